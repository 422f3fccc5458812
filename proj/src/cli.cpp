#include "hs2s/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "hs2s/pipeline.hpp"

namespace hs2s::cli {

namespace fs = std::filesystem;
using io::Checkpoint;
using io::DatasetCache;
using io::RunConfig;
using nd::Matrix;

namespace {

RunConfig load_config(const std::string& path, std::uint64_t seed_override,
                      bool seed_given) {
    RunConfig rc = path.empty() ? io::parse_run_config_text("") : io::parse_run_config(path);
    if (seed_given) rc.seed = seed_override;
    return rc;
}

int feature_dim(const DatasetCache& ds) {
    if (ds.train.empty()) throw DataError("dataset has no training sequences");
    return ds.train.front().frames.cols;
}

void write_history(const fs::path& path, const model::TrainHistory& history) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    char buf[40];
    out << "step,loss\n";
    for (std::size_t i = 0; i < history.step_loss.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", history.step_loss[i]);
        out << i << ',' << buf << "\n";
    }
    out << "# validation per epoch\n";
    for (std::size_t i = 0; i < history.val_loss.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", history.val_loss[i]);
        out << "val" << i << ',' << buf << "\n";
    }
}

// Shared by evaluate/predict/generate/interpolate: pick an input source.
Matrix pick_test_window(const DatasetCache& ds, const model::ArchConfig& cfg, int action,
                        std::uint64_t seed) {
    Rng rng(seed);
    std::vector<int> usable;
    for (int i = 0; i < static_cast<int>(ds.test.size()); ++i)
        if (ds.test[i].frames.rows >= cfg.T &&
            (action < 0 || ds.test[i].action == action))
            usable.push_back(i);
    if (usable.empty()) throw DataError("no test sequence matches the request");
    const int si = usable[rng.uniform_int(usable.size())];
    return motion::window_sample(ds.test[si], cfg.T, cfg.blocks(), cfg.tau, rng).full;
}

const completion::CompletionVector* find_add(const Checkpoint& ckpt, int j,
                                             completion::PairMode mode) {
    for (const auto& cv : ckpt.add_completers)
        if (cv.j == j && cv.mode == mode) return &cv;
    return nullptr;
}

const completion::FnCompleter* find_fn(const Checkpoint& ckpt, int j,
                                       completion::PairMode mode) {
    for (const auto& fn : ckpt.fn_completers)
        if (fn.trained_j == j && fn.mode == mode) return &fn;
    return nullptr;
}

completion::PairMode mode_from(const std::string& s) {
    if (s == "completion") return completion::PairMode::kCompletion;
    if (s == "matching") return completion::PairMode::kMatching;
    if (s == "label") return completion::PairMode::kLabelRecovery;
    throw ArgumentError("target must be completion, matching or label");
}

int default_j(const model::ArchConfig& cfg) { return std::max(1, cfg.blocks() - 1); }

// ---- subcommand bodies ----------------------------------------------------

int cmd_prepare(const RunConfig& rc, const std::string& out_path) {
    const DatasetCache ds = rc.dataset == "human36m" ? pipeline::build_h36m_dataset(rc)
                                                     : pipeline::build_synthetic_dataset(rc);
    const fs::path out = out_path.empty() ? fs::path(rc.out_dir) / "dataset.hs2s"
                                          : fs::path(out_path);
    fs::create_directories(out.parent_path().empty() ? "." : out.parent_path());
    io::save_dataset(out, ds);
    std::cout << "prepared " << ds.train.size() << " train / " << ds.test.size()
              << " test sequences, " << ds.stats.kept_count() << " of "
              << ds.stats.channel_count() << " channels kept -> " << out.string() << "\n";
    return 0;
}

int cmd_train(const RunConfig& rc, const std::string& ckpt_path, bool masked) {
    const DatasetCache ds = pipeline::build_dataset(rc);
    model::ArchConfig cfg = rc.arch_config(feature_dim(ds));
    model::TrainConfig tc = rc.train_config();
    if (masked) {
        if (!rc.use_labels) throw ArgumentError("masked training requires use_labels=true");
        tc.class_masking = true;
        tc.label_channels = ds.vocab.size();
    }
    const auto result = model::train_autoencoder(ds.train, cfg, tc);

    fs::create_directories(rc.out_dir);
    const fs::path out = ckpt_path.empty() ? fs::path(rc.out_dir) / "model.hs2s"
                                           : fs::path(ckpt_path);
    Checkpoint ckpt;
    ckpt.cfg = cfg;
    ckpt.params = result.params;
    ckpt.stats = ds.stats;
    ckpt.vocab = ds.vocab;
    io::save_checkpoint(out, ckpt);
    write_history(fs::path(rc.out_dir) / "loss_history.csv", result.history);

    const double first = result.history.step_loss.empty() ? 0.0
                                                          : result.history.step_loss.front();
    const double last = result.history.step_loss.empty() ? 0.0
                                                         : result.history.step_loss.back();
    std::cout << "trained " << result.history.step_loss.size() << " steps, loss " << first
              << " -> " << last << ", checkpoint " << out.string() << "\n";
    return 0;
}

int cmd_fit_completion(const RunConfig& rc, const std::string& ckpt_path,
                       const std::string& mode, const std::string& target, int j,
                       int samples) {
    Checkpoint ckpt = io::load_checkpoint(ckpt_path);
    const DatasetCache ds = pipeline::build_dataset(rc);
    const completion::PairMode pair_mode = mode_from(target);
    if (j <= 0) j = default_j(ckpt.cfg);

    Rng rng = Rng(rc.seed).fork(21);
    if (pair_mode == completion::PairMode::kLabelRecovery) {
        const auto windows = pipeline::draw_windows(ds.train, ckpt.cfg.T, ckpt.cfg.blocks(),
                                                    ckpt.cfg.tau, samples, rng);
        const auto pairs =
            completion::build_label_pairs(ckpt.params, ckpt.cfg, windows, ds.vocab.size());
        if (mode == "add" || mode == "both")
            ckpt.add_completers.push_back(completion::compute_vj(pairs));
        if (mode == "fn" || mode == "both") {
            completion::FnSchedule schedule;
            schedule.seed = rc.seed + 13;
            ckpt.fn_completers.push_back(completion::fit_fn(pairs, schedule));
        }
    } else {
        const auto windows =
            pipeline::draw_windows(ds.train, ckpt.cfg.T, j, ckpt.cfg.tau, samples, rng);
        if (mode == "add" || mode == "both")
            ckpt.add_completers.push_back(
                completion::compute_vj(ckpt.params, ckpt.cfg, windows, j, pair_mode));
        if (mode == "fn" || mode == "both") {
            const auto pairs =
                completion::build_pairs(ckpt.params, ckpt.cfg, windows, j, pair_mode);
            completion::FnSchedule schedule;
            schedule.seed = rc.seed + 13;
            schedule.lr0 = rc.lr0;
            ckpt.fn_completers.push_back(completion::fit_fn(pairs, schedule));
        }
    }
    if (mode != "add" && mode != "fn" && mode != "both")
        throw ArgumentError("mode must be add, fn or both");
    io::save_checkpoint(ckpt_path, ckpt);
    std::cout << "fitted " << mode << " completer (" << target << ", j=" << j << ", "
              << samples << " samples) -> " << ckpt_path << "\n";
    return 0;
}

int cmd_evaluate(const RunConfig& rc, const std::string& predictor,
                 const std::string& ckpt_path, const std::string& clip_list,
                 int input_frames, int output_frames) {
    const DatasetCache ds = pipeline::build_dataset(rc);
    const bool synthetic = rc.dataset != "human36m";
    const eval::MetricKind kind =
        synthetic ? eval::MetricKind::kEuclidean : eval::MetricKind::kAngle;
    const int label_channels = rc.use_labels ? ds.vocab.size() : 0;

    // sequences must carry a valid action id for per-action rows
    motion::LabelVocab vocab = ds.vocab;
    std::vector<motion::MotionSequence> test = ds.test;
    if (vocab.size() == 0) {
        vocab.names = {"all"};
        for (auto& s : test) s.action = 0;
    }

    const int window = input_frames + output_frames;
    const eval::ClipSelection selection =
        clip_list.empty() ? eval::select_clips(test, vocab, window, rc.seed, 8)
                          : eval::load_clip_list(clip_list);

    eval::Predictor pred;
    Checkpoint ckpt;
    completion::Completer comp;
    if (predictor == "zero-velocity") {
        pred = [](const Matrix& input, int horizon) {
            return eval::zero_velocity_predict(input, horizon);
        };
    } else if (predictor == "add" || predictor == "fn" || predictor == "basic") {
        if (ckpt_path.empty()) throw ArgumentError("--ckpt required for " + predictor);
        ckpt = io::load_checkpoint(ckpt_path);
        if (input_frames % ckpt.cfg.tau != 0)
            throw ArgumentError("input frames must be a multiple of tau");
        const int j = input_frames / ckpt.cfg.tau;
        const completion::PairMode pm = completion::PairMode::kCompletion;
        if (predictor == "fn") {
            const auto* fn = find_fn(ckpt, j, pm);
            if (fn == nullptr) throw DataError("checkpoint has no fn completer for j");
            comp.fn = fn;
        } else {
            const auto* cv = find_add(ckpt, j, pm);
            if (cv == nullptr) throw DataError("checkpoint has no add completer for j");
            comp.add = cv;
        }
        pred = [&, input_frames](const Matrix& input, int horizon) {
            const Matrix out = completion::predict_full(ckpt.params, ckpt.cfg, comp, input);
            Matrix suffix(horizon, out.cols);
            std::copy_n(out.row(input_frames), static_cast<std::size_t>(horizon) * out.cols,
                        suffix.data.begin());
            return suffix;
        };
    } else if (predictor == "h-seq2seq") {
        if (ckpt_path.empty()) throw ArgumentError("--ckpt required for h-seq2seq");
        ckpt = io::load_checkpoint(ckpt_path);
        pred = [&, input_frames](const Matrix& input, int horizon) {
            const auto z = model::encode_prefix(ckpt.params, ckpt.cfg, input);
            const Matrix out = model::decode(ckpt.params, ckpt.cfg, z);
            Matrix suffix(horizon, out.cols);
            std::copy_n(out.row(input_frames), static_cast<std::size_t>(horizon) * out.cols,
                        suffix.data.begin());
            return suffix;
        };
    } else {
        throw ArgumentError("unknown predictor '" + predictor + "'");
    }

    std::vector<eval::ClipRecord> records;
    const eval::ErrorTable table = eval::evaluate_short_term(
        pred, test, vocab, ds.stats, selection, input_frames, output_frames, kind,
        label_channels, {80, 160, 320, 400}, &records);

    fs::create_directories(rc.out_dir);
    const fs::path csv = fs::path(rc.out_dir) / ("eval_" + predictor + ".csv");
    eval::write_error_table_csv(csv, table);
    eval::append_clip_log(fs::path(rc.out_dir) / "clips.jsonl", records, table.horizons_ms,
                          predictor);

    std::cout << "action";
    for (int ms : table.horizons_ms) std::cout << "\t" << ms << "ms";
    std::cout << "\n";
    char buf[64];
    for (std::size_t r = 0; r < table.actions.size(); ++r) {
        std::cout << table.actions[r];
        for (double v : table.cells[r]) {
            std::snprintf(buf, sizeof buf, "%.2f", v);
            std::cout << "\t" << buf;
        }
        std::cout << "\n";
    }
    std::cout << "Average";
    for (double v : table.average) {
        std::snprintf(buf, sizeof buf, "%.2f", v);
        std::cout << "\t" << buf;
    }
    std::cout << "\nwrote " << csv.string() << "\n";
    return 0;
}

int cmd_predict(const RunConfig& rc, const std::string& ckpt_path,
                const std::string& completer, int j, const std::string& input_path) {
    const Checkpoint ckpt = io::load_checkpoint(ckpt_path);
    if (j <= 0) j = default_j(ckpt.cfg);
    const int input_frames = j * ckpt.cfg.tau;

    Matrix window;
    if (!input_path.empty()) {
        const auto loaded = motion::load_expmap_file(input_path);
        Matrix frames = motion::normalize(loaded.seq.frames, ckpt.stats,
                                          motion::Direction::kForward);
        if (frames.rows < input_frames) throw DataError("input has too few frames");
        window = Matrix(input_frames, frames.cols);
        std::copy_n(frames.data.begin(), window.data.size(), window.data.begin());
    } else {
        const DatasetCache ds = pipeline::build_dataset(rc);
        const Matrix full = pick_test_window(ds, ckpt.cfg, -1, rc.seed);
        window = Matrix(input_frames, full.cols);
        std::copy_n(full.data.begin(), window.data.size(), window.data.begin());
    }

    completion::Completer comp;
    const auto pm = completion::PairMode::kCompletion;
    if (completer == "add") {
        const auto* cv = find_add(ckpt, j, pm);
        if (cv == nullptr) throw DataError("checkpoint has no add completer for j=" +
                                           std::to_string(j));
        comp.add = cv;
    } else if (completer == "fn") {
        const auto* fn = find_fn(ckpt, j, pm);
        if (fn == nullptr) throw DataError("checkpoint has no fn completer for j=" +
                                           std::to_string(j));
        comp.fn = fn;
    } else {
        throw ArgumentError("completer must be add or fn");
    }

    const Matrix out = completion::predict_full(ckpt.params, ckpt.cfg, comp, window);
    fs::create_directories(rc.out_dir);
    const int L = rc.use_labels ? ckpt.vocab.size() : 0;
    Matrix stripped(out.rows, out.cols - L);
    for (int t = 0; t < out.rows; ++t) std::copy_n(out.row(t), stripped.cols, stripped.row(t));
    const Matrix raw = motion::normalize(stripped, ckpt.stats, motion::Direction::kInverse);
    const fs::path path = fs::path(rc.out_dir) / "prediction.txt";
    io::write_motion_text(path, raw);
    std::cout << "wrote " << path.string() << " (" << raw.rows << " frames; suffix starts at "
              << input_frames << ")\n";
    return 0;
}

int cmd_generate(const RunConfig& rc, const std::string& ckpt_path, double noise_scale,
                 int count, int j) {
    const Checkpoint ckpt = io::load_checkpoint(ckpt_path);
    if (j <= 0) j = default_j(ckpt.cfg);
    const int input_frames = j * ckpt.cfg.tau;
    const auto pm = completion::PairMode::kCompletion;
    const auto* fn = find_fn(ckpt, j, pm);
    if (fn == nullptr) throw DataError("checkpoint has no fn completer for j=" +
                                       std::to_string(j));
    const auto* cv = find_add(ckpt, j, pm);
    if (cv == nullptr)
        throw DataError("checkpoint has no add completer (sigma source) for j=" +
                        std::to_string(j));

    const DatasetCache ds = pipeline::build_dataset(rc);
    const Matrix full = pick_test_window(ds, ckpt.cfg, -1, rc.seed);
    Matrix window(input_frames, full.cols);
    std::copy_n(full.data.begin(), window.data.size(), window.data.begin());

    fs::create_directories(rc.out_dir);
    Rng rng = Rng(rc.seed).fork(7);
    const int L = rc.use_labels ? ckpt.vocab.size() : 0;
    for (int i = 0; i < count; ++i) {
        const Matrix out = completion::generate_noisy(ckpt.params, ckpt.cfg, *fn, cv->sigma,
                                                      window, noise_scale, rng);
        Matrix stripped(out.rows, out.cols - L);
        for (int t = 0; t < out.rows; ++t)
            std::copy_n(out.row(t), stripped.cols, stripped.row(t));
        const Matrix raw =
            motion::normalize(stripped, ckpt.stats, motion::Direction::kInverse);
        const fs::path path = fs::path(rc.out_dir) / ("generated_" + std::to_string(i) +
                                                      ".txt");
        io::write_motion_text(path, raw);
        std::cout << "wrote " << path.string() << "\n";
    }
    return 0;
}

int cmd_interpolate(const RunConfig& rc, const std::string& ckpt_path, int steps,
                    const std::string& input_a, const std::string& input_b) {
    const Checkpoint ckpt = io::load_checkpoint(ckpt_path);
    const int L = rc.use_labels ? ckpt.vocab.size() : 0;

    DatasetCache ds;
    bool ds_ready = false;
    auto load_window = [&](const std::string& path, int action,
                           std::uint64_t seed) -> Matrix {
        if (!path.empty()) {
            const auto loaded = motion::load_expmap_file(path);
            Matrix frames = motion::normalize(loaded.seq.frames, ckpt.stats,
                                              motion::Direction::kForward);
            if (L > 0) frames = motion::append_label(frames, motion::LabelVocab::kMasked,
                                                     ckpt.vocab);
            if (frames.rows < ckpt.cfg.T) throw DataError(path + " has too few frames");
            Matrix w(ckpt.cfg.T, frames.cols);
            std::copy_n(frames.data.begin(), w.data.size(), w.data.begin());
            return w;
        }
        if (!ds_ready) {
            ds = pipeline::build_dataset(rc);
            ds_ready = true;
        }
        // clamp the requested action to what the dataset offers
        int has_max = -1;
        for (const auto& s : ds.test) has_max = std::max(has_max, s.action);
        return pick_test_window(ds, ckpt.cfg, std::min(action, has_max), seed);
    };

    // default: one window from each of the first two actions
    const Matrix wa = load_window(input_a, input_a.empty() ? 0 : -1, rc.seed + 1);
    const Matrix wb = load_window(input_b, input_b.empty() ? 1 : -1, rc.seed + 2);

    const auto za = model::encode_prefix(ckpt.params, ckpt.cfg, wa);
    const auto zb = model::encode_prefix(ckpt.params, ckpt.cfg, wb);
    const auto decoded = completion::interpolate(ckpt.params, ckpt.cfg, za, zb, steps);

    fs::create_directories(rc.out_dir);
    for (std::size_t i = 0; i < decoded.size(); ++i) {
        Matrix stripped(decoded[i].rows, decoded[i].cols - L);
        for (int t = 0; t < stripped.rows; ++t)
            std::copy_n(decoded[i].row(t), stripped.cols, stripped.row(t));
        const Matrix raw =
            motion::normalize(stripped, ckpt.stats, motion::Direction::kInverse);
        const fs::path path =
            fs::path(rc.out_dir) / ("interp_" + std::to_string(i) + ".txt");
        io::write_motion_text(path, raw);
    }
    std::cout << "wrote " << decoded.size() << " motion files under " << rc.out_dir << "\n";
    return 0;
}

int cmd_classify(const RunConfig& rc, const std::string& variant,
                 const std::string& ckpt_path, int train_pairs, int test_samples) {
    if (variant != "masked" && variant != "recovery")
        throw ArgumentError("variant must be masked or recovery");
    RunConfig cfg = rc;
    cfg.use_labels = true;
    const DatasetCache ds = pipeline::build_dataset(cfg);

    Checkpoint ckpt;
    if (!ckpt_path.empty() && fs::exists(ckpt_path)) {
        ckpt = io::load_checkpoint(ckpt_path);
    } else {
        model::ArchConfig arch = cfg.arch_config(feature_dim(ds));
        model::TrainConfig tc = cfg.train_config();
        tc.class_masking = variant == "masked";
        tc.label_channels = ds.vocab.size();
        const auto result = model::train_autoencoder(ds.train, arch, tc);
        ckpt.cfg = arch;
        ckpt.params = result.params;
        ckpt.stats = ds.stats;
        ckpt.vocab = ds.vocab;
        if (!ckpt_path.empty()) io::save_checkpoint(ckpt_path, ckpt);
    }

    const auto report = pipeline::classify_eval(ds, ckpt.params, ckpt.cfg, train_pairs,
                                                test_samples, rc.seed + 3);
    fs::create_directories(rc.out_dir);
    const fs::path csv = fs::path(rc.out_dir) / ("classify_" + variant + ".csv");
    {
        std::ofstream out(csv);
        out << "completer";
        for (const auto& name : report.class_names) out << "," << name;
        out << ",accuracy\n";
        char buf[40];
        out << "add";
        for (double v : report.add_mean_prob) {
            std::snprintf(buf, sizeof buf, "%.4f", v);
            out << ',' << buf;
        }
        std::snprintf(buf, sizeof buf, "%.4f", report.add_accuracy);
        out << ',' << buf << "\nfn";
        for (double v : report.fn_mean_prob) {
            std::snprintf(buf, sizeof buf, "%.4f", v);
            out << ',' << buf;
        }
        std::snprintf(buf, sizeof buf, "%.4f", report.fn_accuracy);
        out << ',' << buf << "\n";
    }
    std::cout << "classify (" << variant << ", " << report.samples << " samples)\n";
    for (std::size_t c = 0; c < report.class_names.size(); ++c)
        std::cout << "  " << report.class_names[c] << ": add " << report.add_mean_prob[c]
                  << ", fn " << report.fn_mean_prob[c] << "\n";
    std::cout << "  accuracy: add " << report.add_accuracy << ", fn " << report.fn_accuracy
              << "\nwrote " << csv.string() << "\n";
    return 0;
}

int cmd_ablate(const RunConfig& rc, int input_j, int pair_samples) {
    const DatasetCache ds = pipeline::build_dataset(rc);
    const model::ArchConfig cfg = rc.arch_config(feature_dim(ds));
    const model::TrainConfig tc = rc.train_config();
    const eval::MetricKind kind = rc.dataset == "human36m" ? eval::MetricKind::kAngle
                                                           : eval::MetricKind::kEuclidean;
    if (input_j <= 0) input_j = default_j(cfg);
    const auto report =
        eval::run_ablation(ds.train, ds.test, ds.stats, cfg, tc, input_j, pair_samples, kind);

    fs::create_directories(rc.out_dir);
    const fs::path csv = fs::path(rc.out_dir) / "ablation.csv";
    eval::write_ablation_csv(csv, report);
    for (const auto& e : report.entries)
        eval::append_clip_log(fs::path(rc.out_dir) / "ablation_clips.jsonl", e.clips,
                              report.horizons_ms, e.config);

    for (const auto& e : report.entries) {
        std::cout << e.config << ": ";
        if (e.skipped) {
            std::cout << "skipped (" << e.diagnostics << ")";
        } else {
            char buf[40];
            for (double v : e.errors) {
                std::snprintf(buf, sizeof buf, "%.3f ", v);
                std::cout << buf;
            }
            if (e.has_sigma) std::cout << " sigma " << e.mean_sigma << "/" << e.std_sigma;
        }
        std::cout << "\n";
    }
    std::cout << "wrote " << csv.string() << "\n";
    return 0;
}

int cmd_report(const std::string& dir) {
    const fs::path root(dir);
    if (!fs::is_directory(root)) throw DataError("'" + dir + "' is not a directory");
    bool found = false;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (entry.path().extension() != ".csv") continue;
        found = true;
        std::cout << "== " << entry.path().filename().string() << " ==\n";
        std::ifstream in(entry.path());
        std::string line;
        while (std::getline(in, line)) {
            std::replace(line.begin(), line.end(), ',', '\t');
            std::cout << line << "\n";
        }
        std::cout << "\n";
    }
    if (!found) std::cout << "no reports under " << dir << "\n";
    return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& argv) {
    CLI::App app{"Hierarchical sequence-to-sequences autoencoder pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_given = false;
    app.add_option("--config", config_path, "run configuration file")
        ->configurable(false);
    auto* seed_opt = app.add_option("--seed", seed, "override the config seed");

    std::string out_path, ckpt_path, mode = "add", target = "completion";
    std::string predictor = "zero-velocity", clip_list, input_a, input_b, input_path;
    std::string variant = "recovery", report_dir = "out";
    int j = 0, samples = 1000, input_frames = 0, output_frames = 10;
    double noise_scale = 1.0;
    int count = 3, steps = 8;
    int train_pairs = 400, test_samples = 200;
    bool masked_training = false;

    auto* prepare = app.add_subcommand("prepare-data", "ingest, normalize and cache a dataset");
    prepare->add_option("--out", out_path, "cache path (default <out_dir>/dataset.hs2s)");

    auto* train = app.add_subcommand("train-ae", "train the autoencoder");
    train->add_option("--ckpt", ckpt_path, "checkpoint output path");
    train->add_flag("--masked", masked_training, "mask labels/poses in thirds per batch");

    auto* fitc = app.add_subcommand("fit-completion", "fit ADD and/or FN completers");
    fitc->add_option("--ckpt", ckpt_path, "model checkpoint (updated in place)")->required();
    fitc->add_option("--mode", mode, "add | fn | both")->required();
    fitc->add_option("--target", target, "completion | matching | label");
    fitc->add_option("--j", j, "prefix index (default T/tau - 1)");
    fitc->add_option("--samples", samples, "training pairs to draw");

    auto* evaluate = app.add_subcommand("evaluate", "short-term prediction error table");
    evaluate->add_option("--predictor", predictor,
                         "zero-velocity | add | fn | h-seq2seq | basic")->required();
    evaluate->add_option("--ckpt", ckpt_path, "model checkpoint");
    evaluate->add_option("--clip-list", clip_list, "explicit clip selection file");
    evaluate->add_option("--input-frames", input_frames, "input window length");
    evaluate->add_option("--output-frames", output_frames, "prediction length");

    auto* predict = app.add_subcommand("predict", "complete one motion and export it");
    predict->add_option("--ckpt", ckpt_path)->required();
    predict->add_option("--completer", mode, "add | fn");
    predict->add_option("--j", j, "prefix index");
    predict->add_option("--input", input_path, "motion text file (default: test window)");

    auto* generate = app.add_subcommand("generate", "noise-injected generation");
    generate->add_option("--ckpt", ckpt_path)->required();
    generate->add_option("--noise-scale", noise_scale, "sigma multiplier");
    generate->add_option("--count", count, "sequences to generate");
    generate->add_option("--j", j, "prefix index");

    auto* interpolate = app.add_subcommand("interpolate", "decode along a latent segment");
    interpolate->add_option("--ckpt", ckpt_path)->required();
    interpolate->add_option("--steps", steps, "interior steps (outputs steps+1 files)");
    interpolate->add_option("--input-a", input_a, "motion text file A");
    interpolate->add_option("--input-b", input_b, "motion text file B");

    auto* classify = app.add_subcommand("classify", "label recovery / action classification");
    classify->add_option("--variant", variant, "masked | recovery")->required();
    classify->add_option("--ckpt", ckpt_path, "reuse/store the trained model");
    classify->add_option("--train-pairs", train_pairs);
    classify->add_option("--test-samples", test_samples);

    auto* ablate = app.add_subcommand("ablate", "full completion-vs-matching ablation");
    ablate->add_option("--j", j, "input prefix index");
    ablate->add_option("--samples", samples, "pairs per completer");

    auto* report = app.add_subcommand("report", "pretty-print the CSV reports in a directory");
    report->add_option("--dir", report_dir, "output directory to read");

    // --config/--seed may appear after the subcommand name
    for (auto* sub : app.get_subcommands([](CLI::App*) { return true; }))
        sub->fallthrough();

    try {
        std::vector<std::string> args(argv.rbegin(), argv.rend());
        app.parse(args);
        seed_given = seed_opt->count() > 0;

        const RunConfig rc = load_config(config_path, seed, seed_given);
        if (prepare->parsed()) return cmd_prepare(rc, out_path);
        if (train->parsed()) return cmd_train(rc, ckpt_path, masked_training);
        if (fitc->parsed()) return cmd_fit_completion(rc, ckpt_path, mode, target, j, samples);
        if (evaluate->parsed()) {
            if (input_frames <= 0)
                input_frames = rc.T - output_frames;  // full window minus horizon
            return cmd_evaluate(rc, predictor, ckpt_path, clip_list, input_frames,
                                output_frames);
        }
        if (predict->parsed()) return cmd_predict(rc, ckpt_path, mode, j, input_path);
        if (generate->parsed()) return cmd_generate(rc, ckpt_path, noise_scale, count, j);
        if (interpolate->parsed())
            return cmd_interpolate(rc, ckpt_path, steps, input_a, input_b);
        if (classify->parsed())
            return cmd_classify(rc, variant, ckpt_path, train_pairs, test_samples);
        if (ablate->parsed()) return cmd_ablate(rc, j, samples);
        if (report->parsed()) return cmd_report(report_dir);
        std::cerr << "error: usage: no subcommand given\n";
        return 2;
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: usage: " << e.what() << "\n";
        std::cerr << app.help();
        return 2;
    } catch (const ArgumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace hs2s::cli
