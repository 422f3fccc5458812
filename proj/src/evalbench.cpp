#include "hs2s/evalbench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace hs2s::eval {

using model::ArchConfig;
using model::TrainConfig;
using motion::MotionSequence;
using motion::NormStats;
using nd::Matrix;
using nd::Vec;

void ErrorTable::recompute_average() {
    average.assign(horizons_ms.size(), 0.0);
    if (cells.empty()) return;
    for (const auto& row : cells)
        for (std::size_t h = 0; h < average.size(); ++h) average[h] += row[h];
    for (auto& v : average) v /= static_cast<double>(cells.size());
}

Matrix zero_velocity_predict(const Matrix& X, int horizon_frames) {
    if (X.rows < 1) throw ArgumentError("zero_velocity_predict: empty input");
    if (horizon_frames < 0) throw ArgumentError("zero_velocity_predict: negative horizon");
    Matrix out(horizon_frames, X.cols);
    for (int t = 0; t < horizon_frames; ++t)
        std::copy_n(X.row(X.rows - 1), X.cols, out.row(t));
    return out;
}

namespace {

// Per-frame error curve between two denormalized raw-channel frames.
Vec error_curve(const Matrix& pred_raw, const Matrix& gt_raw, MetricKind kind) {
    Vec curve(pred_raw.rows, 0.0);
    for (int t = 0; t < pred_raw.rows; ++t) {
        const double* a = pred_raw.row(t);
        const double* b = gt_raw.row(t);
        double acc = 0.0;
        if (kind == MetricKind::kEuclidean) {
            for (int c = 0; c < pred_raw.cols; ++c) {
                const double d = a[c] - b[c];
                acc += d * d;
            }
        } else {
            // channels 0-5 are the zeroed globals; joints start at channel 3
            // (the zeroed global rotation contributes nothing)
            for (int c = 3; c + 2 < pred_raw.cols; c += 3) {
                const auto ea = motion::rotmat_to_euler(
                    motion::expmap_to_rotmat({a[c], a[c + 1], a[c + 2]}));
                const auto eb = motion::rotmat_to_euler(
                    motion::expmap_to_rotmat({b[c], b[c + 1], b[c + 2]}));
                for (int i = 0; i < 3; ++i) {
                    const double d = ea[i] - eb[i];
                    acc += d * d;
                }
            }
        }
        curve[t] = std::sqrt(acc);
    }
    return curve;
}

Matrix strip_labels(const Matrix& frames, int label_channels) {
    if (label_channels <= 0) return frames;
    Matrix out(frames.rows, frames.cols - label_channels);
    for (int t = 0; t < frames.rows; ++t) std::copy_n(frames.row(t), out.cols, out.row(t));
    return out;
}

int horizon_frame(int ms, double fps) {
    return static_cast<int>(std::lround(ms * fps / 1000.0));
}

}  // namespace

Vec mean_angle_error(const Matrix& pred, const Matrix& gt, const NormStats& stats,
                     const std::vector<int>& horizons_ms, double fps, MetricKind kind,
                     int label_channels) {
    if (pred.rows != gt.rows || pred.cols != gt.cols)
        throw ShapeError("mean_angle_error: prediction/ground truth shape mismatch");
    Matrix pred_raw = motion::normalize(strip_labels(pred, label_channels), stats,
                                        motion::Direction::kInverse);
    Matrix gt_raw = motion::normalize(strip_labels(gt, label_channels), stats,
                                      motion::Direction::kInverse);
    if (kind == MetricKind::kAngle) {
        const int globals = std::min(6, pred_raw.cols);
        for (int t = 0; t < pred_raw.rows; ++t)
            for (int c = 0; c < globals; ++c) {
                pred_raw.at(t, c) = 0.0;
                gt_raw.at(t, c) = 0.0;
            }
    }
    const Vec curve = error_curve(pred_raw, gt_raw, kind);

    Vec out;
    out.reserve(horizons_ms.size());
    for (int ms : horizons_ms) {
        const int frame = horizon_frame(ms, fps);  // 1-based
        if (frame < 1 || frame > pred.rows)
            throw ArgumentError("mean_angle_error: horizon " + std::to_string(ms) +
                                "ms beyond the prediction length");
        out.push_back(curve[frame - 1]);
    }
    return out;
}

ClipSelection select_clips(const std::vector<MotionSequence>& test,
                           const motion::LabelVocab& vocab, int window_frames,
                           std::uint64_t seed, int clips_per_action) {
    ClipSelection sel;
    sel.seed = seed;
    sel.clips_per_action = clips_per_action;
    Rng rng(seed);

    std::vector<std::string> actions = vocab.names;
    std::sort(actions.begin(), actions.end());
    for (const auto& action : actions) {
        const int label = vocab.index_of(action);
        std::vector<int> candidates;
        for (int i = 0; i < static_cast<int>(test.size()); ++i)
            if (test[i].action == label && test[i].frames.rows >= window_frames)
                candidates.push_back(i);
        if (candidates.empty())
            throw SelectionError("no test sequence long enough for action '" + action + "'");
        auto& clips = sel.per_action[action];
        for (int c = 0; c < clips_per_action; ++c) {
            const int seq = candidates[rng.uniform_int(candidates.size())];
            const long span = test[seq].frames.rows - window_frames + 1;
            clips.push_back({seq, static_cast<long>(rng.uniform_int(span))});
        }
    }
    return sel;
}

ClipSelection load_clip_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open clip list " + path.string());
    ClipSelection sel;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string action, seq_str, start_str;
        if (!std::getline(ss, action, ',') || !std::getline(ss, seq_str, ',') ||
            !std::getline(ss, start_str))
            throw FormatError(path.string() + ":" + std::to_string(line_no) +
                              ": expected action,seq_index,start");
        try {
            sel.per_action[action].push_back({std::stoi(seq_str), std::stol(start_str)});
        } catch (const std::exception&) {
            throw FormatError(path.string() + ":" + std::to_string(line_no) +
                              ": bad integer");
        }
    }
    if (sel.per_action.empty()) throw FormatError(path.string() + ": empty clip list");
    return sel;
}

ErrorTable evaluate_short_term(const Predictor& predictor,
                               const std::vector<MotionSequence>& test,
                               const motion::LabelVocab& /*vocab*/, const NormStats& stats,
                               const ClipSelection& selection, int input_frames,
                               int output_frames, MetricKind kind, int label_channels,
                               const std::vector<int>& horizons_ms,
                               std::vector<ClipRecord>* records) {
    ErrorTable table;
    table.horizons_ms = horizons_ms;
    const int window = input_frames + output_frames;

    for (const auto& [action, clips] : selection.per_action) {
        Vec row(horizons_ms.size(), 0.0);
        for (const auto& clip : clips) {
            if (clip.seq_index < 0 || clip.seq_index >= static_cast<int>(test.size()))
                throw SelectionError("clip references sequence " +
                                     std::to_string(clip.seq_index) + " out of range");
            const Matrix& frames = test[clip.seq_index].frames;
            if (clip.start < 0 || clip.start + window > frames.rows)
                throw SelectionError("clip start " + std::to_string(clip.start) +
                                     " out of range for action '" + action + "'");
            Matrix input(input_frames, frames.cols);
            std::copy_n(frames.row(clip.start),
                        static_cast<std::size_t>(input_frames) * frames.cols,
                        input.data.begin());
            Matrix gt(output_frames, frames.cols);
            std::copy_n(frames.row(clip.start + input_frames),
                        static_cast<std::size_t>(output_frames) * frames.cols,
                        gt.data.begin());

            Matrix pred = predictor(input, output_frames);
            if (pred.rows < output_frames)
                throw SelectionError("predictor returned fewer frames than required");
            if (pred.rows > output_frames) {
                Matrix trimmed(output_frames, pred.cols);
                std::copy_n(pred.data.begin(), trimmed.data.size(), trimmed.data.begin());
                pred = std::move(trimmed);
            }
            const Vec errs = mean_angle_error(pred, gt, stats, horizons_ms,
                                              test[clip.seq_index].fps, kind, label_channels);
            for (std::size_t h = 0; h < errs.size(); ++h) row[h] += errs[h];
            if (records != nullptr)
                records->push_back({action, clip.seq_index, clip.start, errs});
        }
        for (auto& v : row) v /= static_cast<double>(clips.size());
        table.actions.push_back(action);
        table.cells.push_back(std::move(row));
    }
    table.recompute_average();
    return table;
}

const AblationEntry* AblationReport::find(const std::string& config) const {
    for (const auto& e : entries)
        if (e.config == config) return &e;
    return nullptr;
}

AblationReport run_ablation(const std::vector<MotionSequence>& train,
                            const std::vector<MotionSequence>& test, const NormStats& stats,
                            const ArchConfig& cfg, const TrainConfig& tc, int input_j,
                            int pair_samples, MetricKind kind) {
    AblationReport report;
    report.horizons_ms = {80, 160, 320, 400};
    const int input_frames = input_j * cfg.tau;
    const int output_frames = cfg.T - input_frames;
    if (output_frames < 1) throw ArgumentError("run_ablation: input_j leaves no suffix");

    motion::LabelVocab pseudo;  // test sequences grouped under one action row
    pseudo.names = {"all"};
    std::vector<MotionSequence> test_tagged = test;
    for (auto& s : test_tagged) s.action = 0;
    const ClipSelection selection =
        select_clips(test_tagged, pseudo, cfg.T, tc.seed + 77, 16);

    // identical training windows for every trained configuration
    auto pair_windows = [&](std::uint64_t stream) {
        Rng rng = Rng(tc.seed).fork(stream);
        std::vector<motion::SampleWindow> out;
        std::vector<int> usable;
        for (int i = 0; i < static_cast<int>(train.size()); ++i)
            if (train[i].frames.rows >= cfg.T) usable.push_back(i);
        for (int s = 0; s < pair_samples; ++s) {
            const int si = usable[rng.uniform_int(usable.size())];
            out.push_back(motion::window_sample(train[si], cfg.T, input_j, cfg.tau, rng));
        }
        return out;
    };

    auto score = [&](const Predictor& pred, std::vector<ClipRecord>& clips) {
        const ErrorTable t =
            evaluate_short_term(pred, test_tagged, pseudo, stats, selection, input_frames,
                                output_frames, kind, 0, report.horizons_ms, &clips);
        return t.average;
    };

    auto add_entry = [&](const std::string& name, const std::function<AblationEntry()>& run) {
        AblationEntry entry;
        entry.config = name;
        try {
            entry = run();
            entry.config = name;
        } catch (const std::exception& e) {
            entry.skipped = true;
            entry.diagnostics = e.what();
        }
        report.entries.push_back(std::move(entry));
    };

    // 1+2: end-to-end hierarchical seq2seq baselines
    for (const auto target : {model::SeqTarget::kSuffix, model::SeqTarget::kFullWindow}) {
        const std::string name = target == model::SeqTarget::kSuffix
                                     ? "h_seq2seq_x_to_y"
                                     : "h_seq2seq_x_to_xy";
        add_entry(name, [&] {
            ArchConfig c = cfg;
            c.variant = model::Variant::kHSeq2Seq;
            c.seq_target = target;
            c.fixed_j = input_j;
            const auto trained = model::train_autoencoder(train, c, tc);
            AblationEntry e;
            e.errors = score([&](const Matrix& input, int horizon) {
                const auto z = model::encode_prefix(trained.params, c, input);
                const Matrix out = model::decode(trained.params, c, z);
                Matrix suffix(horizon, out.cols);
                std::copy_n(out.row(input_frames),
                            static_cast<std::size_t>(horizon) * out.cols,
                            suffix.data.begin());
                return suffix;
            }, e.clips);
            return e;
        });
    }

    // 3..8: autoencoders with ADD/FN completers
    struct AeSpec {
        model::Variant variant;
        const char* tag;
        std::vector<completion::PairMode> modes;
    };
    const std::vector<AeSpec> specs = {
        {model::Variant::kBasicPad, "basic", {completion::PairMode::kCompletion}},
        {model::Variant::kHs2sae,
         "ours",
         {completion::PairMode::kCompletion, completion::PairMode::kMatching}},
    };

    for (const auto& spec : specs) {
        ArchConfig c = cfg;
        c.variant = spec.variant;
        model::TrainResult trained;
        bool train_ok = true;
        std::string train_err;
        try {
            trained = model::train_autoencoder(train, c, tc);
        } catch (const std::exception& e) {
            train_ok = false;
            train_err = e.what();
        }
        const auto windows = pair_windows(31);

        for (const auto mode : spec.modes) {
            const std::string mode_tag =
                spec.variant == model::Variant::kBasicPad ? "" :
                (mode == completion::PairMode::kCompletion ? "_completion" : "_matching");
            // suffix location in the decoded window depends on the pairing
            const bool decode_is_suffix = mode == completion::PairMode::kMatching;

            add_entry(std::string(spec.tag) + "_add" + mode_tag, [&] {
                if (!train_ok) throw DataError(train_err);
                const auto cv = completion::compute_vj(trained.params, c, windows, input_j, mode);
                AblationEntry e;
                double mean_s = 0.0, var_s = 0.0;
                for (double s : cv.sigma) mean_s += s;
                mean_s /= static_cast<double>(cv.sigma.size());
                for (double s : cv.sigma) var_s += (s - mean_s) * (s - mean_s);
                e.mean_sigma = mean_s;
                e.std_sigma = std::sqrt(var_s / static_cast<double>(cv.sigma.size()));
                e.has_sigma = true;
                completion::Completer comp;
                comp.add = &cv;
                e.errors = score([&](const Matrix& input, int horizon) {
                    const Matrix out = completion::predict_full(trained.params, c, comp, input);
                    Matrix suffix(horizon, out.cols);
                    const int first = decode_is_suffix ? 0 : input_frames;
                    std::copy_n(out.row(first), static_cast<std::size_t>(horizon) * out.cols,
                                suffix.data.begin());
                    return suffix;
                }, e.clips);
                return e;
            });

            add_entry(std::string(spec.tag) + "_fn" + mode_tag, [&] {
                if (!train_ok) throw DataError(train_err);
                const auto pairs = completion::build_pairs(trained.params, c, windows,
                                                           input_j, mode);
                completion::FnSchedule schedule;
                schedule.seed = tc.seed + 5;
                schedule.batch = tc.batch;
                const auto fn = completion::fit_fn(pairs, schedule);
                completion::Completer comp;
                comp.fn = &fn;
                AblationEntry e;
                e.errors = score([&](const Matrix& input, int horizon) {
                    const Matrix out = completion::predict_full(trained.params, c, comp, input);
                    Matrix suffix(horizon, out.cols);
                    const int first = decode_is_suffix ? 0 : input_frames;
                    std::copy_n(out.row(first), static_cast<std::size_t>(horizon) * out.cols,
                                suffix.data.begin());
                    return suffix;
                }, e.clips);
                return e;
            });
        }
    }
    return report;
}

void write_error_table_csv(const std::filesystem::path& path, const ErrorTable& table) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << "action";
    for (int ms : table.horizons_ms) out << ",ms" << ms;
    out << "\n";
    char buf[64];
    auto emit = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.6f", v);
        out << ',' << buf;
    };
    for (std::size_t r = 0; r < table.actions.size(); ++r) {
        out << table.actions[r];
        for (double v : table.cells[r]) emit(v);
        out << "\n";
    }
    out << "Average";
    for (double v : table.average) emit(v);
    out << "\n";
}

ErrorTable read_error_table_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    ErrorTable table;
    std::string line;
    if (!std::getline(in, line)) throw FormatError(path.string() + ": empty file");
    {
        std::istringstream ss(line);
        std::string tok;
        std::getline(ss, tok, ',');
        while (std::getline(ss, tok, ',')) {
            if (tok.rfind("ms", 0) != 0) throw FormatError("bad header column " + tok);
            table.horizons_ms.push_back(std::stoi(tok.substr(2)));
        }
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string name, tok;
        std::getline(ss, name, ',');
        Vec row;
        while (std::getline(ss, tok, ',')) row.push_back(std::stod(tok));
        if (row.size() != table.horizons_ms.size())
            throw FormatError(path.string() + ": ragged row " + name);
        if (name == "Average") {
            table.average = std::move(row);
        } else {
            table.actions.push_back(name);
            table.cells.push_back(std::move(row));
        }
    }
    return table;
}

void write_ablation_csv(const std::filesystem::path& path, const AblationReport& report) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << "config";
    for (int ms : report.horizons_ms) out << ",ms" << ms;
    out << ",mean_sigma,std_sigma,skipped,diagnostics\n";
    char buf[64];
    for (const auto& e : report.entries) {
        out << e.config;
        if (e.skipped) {
            for (std::size_t i = 0; i < report.horizons_ms.size(); ++i) out << ",";
            out << ",,";
        } else {
            for (double v : e.errors) {
                std::snprintf(buf, sizeof buf, "%.6f", v);
                out << ',' << buf;
            }
            if (e.has_sigma) {
                std::snprintf(buf, sizeof buf, "%.6f,%.6f", e.mean_sigma, e.std_sigma);
                out << ',' << buf;
            } else {
                out << ",,";
            }
        }
        out << ',' << (e.skipped ? "yes" : "no") << ',';
        // keep the csv single-line per entry
        std::string diag = e.diagnostics;
        std::replace(diag.begin(), diag.end(), '\n', ' ');
        std::replace(diag.begin(), diag.end(), ',', ';');
        out << diag << "\n";
    }
}

void append_clip_log(const std::filesystem::path& path,
                     const std::vector<ClipRecord>& records,
                     const std::vector<int>& horizons_ms, const std::string& tag) {
    std::ofstream out(path, std::ios::app);
    if (!out) throw DataError("cannot write " + path.string());
    char buf[64];
    for (const auto& r : records) {
        out << "{";
        if (!tag.empty()) out << "\"config\":\"" << tag << "\",";
        out << "\"action\":\"" << r.action << "\",\"seq_index\":" << r.seq_index
            << ",\"start\":" << r.start << ",\"errors\":{";
        for (std::size_t h = 0; h < horizons_ms.size(); ++h) {
            std::snprintf(buf, sizeof buf, "%.9g", r.errors[h]);
            out << (h ? "," : "") << "\"ms" << horizons_ms[h] << "\":" << buf;
        }
        out << "}}\n";
    }
}

}  // namespace hs2s::eval
