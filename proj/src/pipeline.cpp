#include "hs2s/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <map>

namespace hs2s::pipeline {

namespace fs = std::filesystem;
using io::DatasetCache;
using io::RunConfig;
using motion::MotionSequence;
using nd::Matrix;

DatasetCache build_synthetic_dataset(const RunConfig& rc) {
    const bool want_walk = rc.dataset == "sine_walk" || rc.dataset == "sine_mix";
    const bool want_sit = rc.dataset == "sine_sit" || rc.dataset == "sine_mix";
    if (!want_walk && !want_sit)
        throw ArgumentError("dataset must be sine_walk, sine_sit or sine_mix, got '" +
                            rc.dataset + "'");

    DatasetCache ds;
    if (want_walk) ds.vocab.names.push_back("sine_walk");
    if (want_sit) ds.vocab.names.push_back("sine_sit");

    std::vector<MotionSequence> raw;
    int label = 0;
    for (const auto family :
         {motion::SynthFamily::kSineWalk, motion::SynthFamily::kSineSit}) {
        const bool wanted =
            family == motion::SynthFamily::kSineWalk ? want_walk : want_sit;
        if (!wanted) continue;
        for (int i = 0; i < rc.synth_sequences; ++i) {
            MotionSequence s = motion::synth_motion(family, rc.synth_channels,
                                                    rc.synth_length, rc.seed + i);
            s.action = label;
            raw.push_back(std::move(s));
        }
        ++label;
    }

    // deterministic split: every 5th sequence held out for testing
    std::vector<MotionSequence> train_raw, test_raw;
    for (std::size_t i = 0; i < raw.size(); ++i)
        (i % 5 == 4 ? test_raw : train_raw).push_back(std::move(raw[i]));

    ds.stats = motion::compute_norm_stats(train_raw, rc.scheme(), rc.ignore_threshold);
    auto finish = [&](std::vector<MotionSequence>& src, std::vector<MotionSequence>& dst) {
        for (auto& s : src) {
            MotionSequence n = motion::normalize(s, ds.stats, motion::Direction::kForward);
            if (rc.use_labels) n.frames = motion::append_label(n.frames, n.action, ds.vocab);
            dst.push_back(std::move(n));
        }
    };
    finish(train_raw, ds.train);
    finish(test_raw, ds.test);
    return ds;
}

DatasetCache build_h36m_dataset(const RunConfig& rc) {
    if (rc.data_dir.empty())
        throw DataError("no data_dir configured and HS2S_DATA_DIR is unset");
    const fs::path root(rc.data_dir);
    if (!fs::is_directory(root))
        throw DataError("data_dir '" + rc.data_dir + "' is not a directory");

    struct Entry {
        motion::LoadedSequence loaded;
        std::string path;
    };
    std::vector<Entry> entries;
    std::vector<fs::path> files;
    for (const auto& subject_dir : fs::directory_iterator(root)) {
        if (!subject_dir.is_directory()) continue;
        const std::string name = subject_dir.path().filename().string();
        if (name.empty() || name[0] != 'S') continue;
        for (const auto& file : fs::directory_iterator(subject_dir.path()))
            if (file.path().extension() == ".txt") files.push_back(file.path());
    }
    if (files.empty()) throw DataError("no S*/.txt motion files under " + rc.data_dir);
    std::sort(files.begin(), files.end());  // deterministic ingestion order

    DatasetCache ds;
    std::map<std::string, int> action_ids;
    for (const auto& f : files) {
        Entry e{motion::load_expmap_file(f), f.string()};
        if (!e.loaded.action_name.empty() &&
            action_ids.find(e.loaded.action_name) == action_ids.end())
            action_ids.emplace(e.loaded.action_name, 0);
        entries.push_back(std::move(e));
    }
    int next = 0;
    for (auto& [name, id] : action_ids) {
        id = next++;
        ds.vocab.names.push_back(name);
    }

    std::vector<MotionSequence> train_raw, test_raw;
    for (auto& e : entries) {
        MotionSequence s = motion::downsample(e.loaded.seq, rc.downsample);
        if (!e.loaded.action_name.empty()) s.action = action_ids[e.loaded.action_name];
        (s.subject == rc.test_subject ? test_raw : train_raw).push_back(std::move(s));
    }
    if (train_raw.empty()) throw DataError("no training subjects found");

    ds.stats = motion::compute_norm_stats(train_raw, rc.scheme(), rc.ignore_threshold);
    auto finish = [&](std::vector<MotionSequence>& src, std::vector<MotionSequence>& dst) {
        for (auto& s : src) {
            MotionSequence n = motion::normalize(s, ds.stats, motion::Direction::kForward);
            if (rc.use_labels) n.frames = motion::append_label(n.frames, n.action, ds.vocab);
            dst.push_back(std::move(n));
        }
    };
    finish(train_raw, ds.train);
    finish(test_raw, ds.test);
    return ds;
}

DatasetCache build_dataset(const RunConfig& rc) {
    if (!rc.cache_path.empty() && fs::exists(rc.cache_path))
        return io::load_dataset(rc.cache_path);
    if (rc.dataset == "human36m") return build_h36m_dataset(rc);
    return build_synthetic_dataset(rc);
}

std::vector<motion::SampleWindow> draw_windows(const std::vector<MotionSequence>& seqs,
                                               int T, int j, int tau, int count, Rng& rng) {
    std::vector<int> usable;
    for (int i = 0; i < static_cast<int>(seqs.size()); ++i)
        if (seqs[i].frames.rows >= T) usable.push_back(i);
    if (usable.empty()) throw DataError("draw_windows: no sequence long enough");
    std::vector<motion::SampleWindow> out;
    out.reserve(count);
    for (int s = 0; s < count; ++s) {
        const int si = usable[rng.uniform_int(usable.size())];
        out.push_back(motion::window_sample(seqs[si], T, j, tau, rng));
    }
    return out;
}

ClassifyReport classify_eval(const DatasetCache& ds, const model::ModelParams& params,
                             const model::ArchConfig& cfg, int train_pairs, int test_samples,
                             std::uint64_t seed) {
    const int L = ds.vocab.size();
    if (L < 2) throw ArgumentError("classify_eval: need at least two classes");

    Rng master(seed);
    Rng train_rng = master.fork(1);
    Rng test_rng = master.fork(2);

    const int K = cfg.blocks();
    const auto train_windows = draw_windows(ds.train, cfg.T, K, cfg.tau, train_pairs,
                                            train_rng);
    const auto pairs = completion::build_label_pairs(params, cfg, train_windows, L);
    const auto cv = completion::compute_vj(pairs);
    // recovering a large label jump from a weak cue needs a long fit
    completion::FnSchedule schedule;
    schedule.seed = seed + 13;
    schedule.lr0 = 1e-2;
    schedule.epochs = 150;
    schedule.halve_every = 15;
    schedule.batch = 32;
    const auto fn = completion::fit_fn(pairs, schedule);

    ClassifyReport report;
    report.class_names = ds.vocab.names;
    report.add_mean_prob.assign(L, 0.0);
    report.fn_mean_prob.assign(L, 0.0);
    std::vector<int> counts(L, 0);
    int add_hits = 0, fn_hits = 0, total = 0;

    const auto test_windows = draw_windows(ds.test, cfg.T, K, cfg.tau, test_samples,
                                           test_rng);
    // recover the true label from the appended one-hot block
    for (const auto& w : test_windows) {
        const int pose_cols = w.full.cols - L;
        int truth = -1;
        for (int c = 0; c < L; ++c)
            if (w.full.at(0, pose_cols + c) > 0.5) truth = c;
        if (truth < 0) continue;

        Matrix unlabeled = w.full;
        for (int t = 0; t < unlabeled.rows; ++t)
            std::fill_n(unlabeled.row(t) + pose_cols, L, 0.0);
        const auto z = model::encode_prefix(params, cfg, unlabeled);

        const auto z_add = completion::complete_add(z, cv, cfg);
        const auto probs_add =
            completion::read_label_probs(model::decode(params, cfg, z_add), L);
        model::LatentCode z_fn;
        z_fn.prefix_len = cfg.T;
        z_fn.z = completion::apply_fn(fn, z.z);
        const auto probs_fn =
            completion::read_label_probs(model::decode(params, cfg, z_fn), L);

        report.add_mean_prob[truth] += probs_add[truth];
        report.fn_mean_prob[truth] += probs_fn[truth];
        ++counts[truth];
        const int add_top = static_cast<int>(
            std::max_element(probs_add.begin(), probs_add.end()) - probs_add.begin());
        const int fn_top = static_cast<int>(
            std::max_element(probs_fn.begin(), probs_fn.end()) - probs_fn.begin());
        if (add_top == truth) ++add_hits;
        if (fn_top == truth) ++fn_hits;
        ++total;
    }
    double add_sum = 0.0, fn_sum = 0.0;
    for (int c = 0; c < L; ++c) {
        add_sum += report.add_mean_prob[c];
        fn_sum += report.fn_mean_prob[c];
        if (counts[c] == 0) continue;
        report.add_mean_prob[c] /= counts[c];
        report.fn_mean_prob[c] /= counts[c];
    }
    report.add_overall = total > 0 ? add_sum / total : 0.0;
    report.fn_overall = total > 0 ? fn_sum / total : 0.0;
    report.add_accuracy = total > 0 ? static_cast<double>(add_hits) / total : 0.0;
    report.fn_accuracy = total > 0 ? static_cast<double>(fn_hits) / total : 0.0;
    report.samples = total;
    return report;
}

}  // namespace hs2s::pipeline
