#include "hs2s/motiondata.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace hs2s::motion {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

bool parse_double(std::string_view token, double& out) {
    const char* first = token.data();
    const char* last = token.data() + token.size();
    while (first != last && (*first == ' ' || *first == '\t')) ++first;
    while (last != first && (last[-1] == ' ' || last[-1] == '\t' || last[-1] == '\r')) --last;
    if (first == last) return false;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

}  // namespace

int NormStats::kept_count() const {
    int n = 0;
    for (auto k : keep_mask) n += k != 0;
    return n;
}

nd::Matrix SampleWindow::prefix() const {
    nd::Matrix x(prefix_len, full.cols);
    std::copy_n(full.data.begin(), static_cast<std::size_t>(prefix_len) * full.cols,
                x.data.begin());
    return x;
}

nd::Matrix SampleWindow::suffix() const {
    const int rows = full.rows - prefix_len;
    nd::Matrix y(rows, full.cols);
    std::copy_n(full.row(prefix_len), static_cast<std::size_t>(rows) * full.cols,
                y.data.begin());
    return y;
}

int LabelVocab::index_of(const std::string& name) const {
    for (int i = 0; i < size(); ++i)
        if (names[i] == name) return i;
    return -1;
}

LoadedSequence load_expmap_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());

    std::vector<double> values;
    int channels = -1;
    int rows = 0;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        // ignore trailing blank lines
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        int count = 0;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            std::size_t comma = line.find(',', pos);
            if (comma == std::string::npos) comma = line.size();
            double v = 0.0;
            if (!parse_double(std::string_view(line).substr(pos, comma - pos), v))
                throw FormatError(path.string() + ":" + std::to_string(line_no) +
                                  ": non-numeric token");
            values.push_back(v);
            ++count;
            pos = comma + 1;
            if (comma == line.size()) break;
        }
        if (channels < 0) channels = count;
        if (count != channels)
            throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                              std::to_string(channels) + " channels, got " +
                              std::to_string(count));
        ++rows;
    }
    if (rows == 0) throw FormatError(path.string() + ": empty file");

    LoadedSequence out;
    out.seq.frames = nd::Matrix(rows, channels);
    out.seq.frames.data = std::move(values);
    out.seq.fps = 50.0;

    // path convention: .../S<subject>/<action>_<index>.txt
    const std::string stem = path.stem().string();
    const auto underscore = stem.rfind('_');
    if (underscore != std::string::npos && underscore > 0) {
        const std::string idx = stem.substr(underscore + 1);
        if (!idx.empty() && std::all_of(idx.begin(), idx.end(),
                                        [](unsigned char c) { return std::isdigit(c); }))
            out.action_name = stem.substr(0, underscore);
    }
    const std::string parent = path.parent_path().filename().string();
    if (parent.size() >= 2 && parent[0] == 'S') {
        const std::string num = parent.substr(1);
        if (std::all_of(num.begin(), num.end(),
                        [](unsigned char c) { return std::isdigit(c); }))
            out.seq.subject = std::stoi(num);
    }
    return out;
}

MotionSequence downsample(const MotionSequence& seq, int factor) {
    if (factor < 1) throw ArgumentError("downsample: factor must be >= 1");
    if (factor == 1) return seq;
    MotionSequence out;
    const int rows = (seq.frames.rows + factor - 1) / factor;
    out.frames = nd::Matrix(rows, seq.frames.cols);
    for (int t = 0; t < rows; ++t)
        std::copy_n(seq.frames.row(t * factor), seq.frames.cols, out.frames.row(t));
    out.fps = seq.fps / factor;
    out.action = seq.action;
    out.subject = seq.subject;
    return out;
}

NormStats compute_norm_stats(const std::vector<MotionSequence>& train, NormScheme scheme,
                             double ignore_threshold) {
    if (train.empty()) throw ArgumentError("compute_norm_stats: empty training set");
    const int C = train.front().frames.cols;
    long total = 0;
    for (const auto& s : train) {
        if (s.frames.cols != C)
            throw ShapeError("compute_norm_stats: inconsistent channel counts");
        total += s.frames.rows;
    }
    if (total == 0) throw ArgumentError("compute_norm_stats: no frames");

    NormStats st;
    st.scheme = scheme;
    st.ignore_threshold = ignore_threshold;
    st.mean.assign(C, 0.0);
    st.stddev.assign(C, 0.0);
    st.min.assign(C, std::numeric_limits<double>::infinity());
    st.max.assign(C, -std::numeric_limits<double>::infinity());

    for (const auto& s : train)
        for (int t = 0; t < s.frames.rows; ++t) {
            const double* f = s.frames.row(t);
            for (int c = 0; c < C; ++c) {
                st.mean[c] += f[c];
                st.min[c] = std::min(st.min[c], f[c]);
                st.max[c] = std::max(st.max[c], f[c]);
            }
        }
    for (int c = 0; c < C; ++c) st.mean[c] /= static_cast<double>(total);
    for (const auto& s : train)
        for (int t = 0; t < s.frames.rows; ++t) {
            const double* f = s.frames.row(t);
            for (int c = 0; c < C; ++c) {
                const double d = f[c] - st.mean[c];
                st.stddev[c] += d * d;
            }
        }
    st.keep_mask.assign(C, 0);
    for (int c = 0; c < C; ++c) {
        st.stddev[c] = std::sqrt(st.stddev[c] / static_cast<double>(total));  // population
        st.keep_mask[c] = st.stddev[c] >= ignore_threshold ? 1 : 0;
    }
    return st;
}

nd::Matrix normalize(const nd::Matrix& frames, const NormStats& stats, Direction dir) {
    const int C = stats.channel_count();
    const int kept = stats.kept_count();

    if (dir == Direction::kForward) {
        if (frames.cols != C)
            throw ShapeError("normalize: got " + std::to_string(frames.cols) +
                             " channels, stats have " + std::to_string(C));
        nd::Matrix out(frames.rows, kept);
        for (int t = 0; t < frames.rows; ++t) {
            const double* f = frames.row(t);
            double* o = out.row(t);
            int k = 0;
            for (int c = 0; c < C; ++c) {
                if (!stats.keep_mask[c]) continue;
                if (stats.scheme == NormScheme::kZscore) {
                    o[k++] = (f[c] - stats.mean[c]) / stats.stddev[c];
                } else {
                    // mean subtraction first, then min/max scaling to [-1, 1];
                    // min'/max' are the post-mean-subtraction extrema
                    const double lo = stats.min[c] - stats.mean[c];
                    const double hi = stats.max[c] - stats.mean[c];
                    if (hi - lo <= 0.0)
                        throw StatsError("normalize: zero range on kept channel " +
                                         std::to_string(c));
                    o[k++] = 2.0 * (f[c] - stats.mean[c] - lo) / (hi - lo) - 1.0;
                }
            }
        }
        return out;
    }

    if (frames.cols != kept)
        throw ShapeError("normalize inverse: got " + std::to_string(frames.cols) +
                         " channels, expected " + std::to_string(kept) + " kept");
    nd::Matrix out(frames.rows, C);
    for (int t = 0; t < frames.rows; ++t) {
        const double* f = frames.row(t);
        double* o = out.row(t);
        int k = 0;
        for (int c = 0; c < C; ++c) {
            if (!stats.keep_mask[c]) {
                o[c] = stats.mean[c];
                continue;
            }
            if (stats.scheme == NormScheme::kZscore) {
                o[c] = f[k++] * stats.stddev[c] + stats.mean[c];
            } else {
                const double lo = stats.min[c] - stats.mean[c];
                const double hi = stats.max[c] - stats.mean[c];
                if (hi - lo <= 0.0)
                    throw StatsError("normalize: zero range on kept channel " +
                                     std::to_string(c));
                o[c] = (f[k++] + 1.0) * (hi - lo) / 2.0 + lo + stats.mean[c];
            }
        }
    }
    return out;
}

MotionSequence normalize(const MotionSequence& seq, const NormStats& stats, Direction dir) {
    MotionSequence out = seq;
    out.frames = normalize(seq.frames, stats, dir);
    return out;
}

nd::Matrix append_label(const nd::Matrix& frames, int label_id, const LabelVocab& vocab) {
    const int L = vocab.size();
    if (label_id != LabelVocab::kMasked && (label_id < 0 || label_id >= L))
        throw ArgumentError("append_label: label id " + std::to_string(label_id) +
                            " outside vocab of size " + std::to_string(L));
    nd::Matrix out(frames.rows, frames.cols + L);
    for (int t = 0; t < frames.rows; ++t) {
        std::copy_n(frames.row(t), frames.cols, out.row(t));
        double* tail = out.row(t) + frames.cols;
        std::fill_n(tail, L, 0.0);
        if (label_id != LabelVocab::kMasked) tail[label_id] = 1.0;
    }
    return out;
}

SampleWindow window_sample(const MotionSequence& seq, int T, int j, int tau, Rng& rng) {
    if (tau < 1 || T % tau != 0) throw ArgumentError("window_sample: tau must divide T");
    if (j < 1 || j > T / tau) throw ArgumentError("window_sample: j out of range");
    if (seq.frames.rows < T)
        throw ArgumentError("window_sample: sequence of " + std::to_string(seq.frames.rows) +
                            " frames shorter than T=" + std::to_string(T));
    // always exactly one draw, even when the start is forced
    const auto span = static_cast<std::uint64_t>(seq.frames.rows - T + 1);
    const auto start = static_cast<int>(rng.next_u64() % span);
    SampleWindow w;
    w.j = j;
    w.prefix_len = j * tau;
    w.full = nd::Matrix(T, seq.frames.cols);
    std::copy_n(seq.frames.row(start), static_cast<std::size_t>(T) * seq.frames.cols,
                w.full.data.begin());
    return w;
}

nd::Matrix expmap_to_rotmat(const std::array<double, 3>& r) {
    const double theta = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
    nd::Matrix R(3, 3);
    R.at(0, 0) = R.at(1, 1) = R.at(2, 2) = 1.0;
    if (theta < 1e-12) return R;

    const double a = std::sin(theta) / theta;
    const double b = (1.0 - std::cos(theta)) / (theta * theta);
    // K = [r]x, R = I + a K + b K^2
    const double x = r[0], y = r[1], z = r[2];
    R.at(0, 0) = 1.0 + b * (-z * z - y * y);
    R.at(0, 1) = -a * z + b * x * y;
    R.at(0, 2) = a * y + b * x * z;
    R.at(1, 0) = a * z + b * x * y;
    R.at(1, 1) = 1.0 + b * (-z * z - x * x);
    R.at(1, 2) = -a * x + b * y * z;
    R.at(2, 0) = -a * y + b * x * z;
    R.at(2, 1) = a * x + b * y * z;
    R.at(2, 2) = 1.0 + b * (-y * y - x * x);
    return R;
}

std::array<double, 3> rotmat_to_euler(const nd::Matrix& R) {
    if (R.rows != 3 || R.cols != 3) throw ArgumentError("rotmat_to_euler: expected 3x3");
    // orthonormality check: max |R^T R - I|
    double worst = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double dot = 0.0;
            for (int k = 0; k < 3; ++k) dot += R.at(k, i) * R.at(k, j);
            worst = std::max(worst, std::abs(dot - (i == j ? 1.0 : 0.0)));
        }
    if (worst > 1e-6)
        throw ArgumentError("rotmat_to_euler: input not orthonormal (deviation " +
                            std::to_string(worst) + ")");

    // R = Rz(yaw) Ry(pitch) Rx(roll):
    //   R31 = -sin(pitch), R21/R11 -> yaw, R32/R33 -> roll
    std::array<double, 3> e{};
    const double r31 = R.at(2, 0);
    if (std::abs(r31) >= 1.0 - 1e-9) {
        e[1] = r31 < 0.0 ? kPi / 2.0 : -kPi / 2.0;
        e[2] = 0.0;  // roll pinned at gimbal lock
        e[0] = std::atan2(-R.at(0, 1), R.at(1, 1));
    } else {
        e[1] = std::asin(-r31);
        e[0] = std::atan2(R.at(1, 0), R.at(0, 0));
        e[2] = std::atan2(R.at(2, 1), R.at(2, 2));
    }
    return e;
}

const char* synth_family_name(SynthFamily family) {
    return family == SynthFamily::kSineWalk ? "sine_walk" : "sine_sit";
}

MotionSequence synth_motion(SynthFamily family, int channels, int length,
                            std::uint64_t seed) {
    if (channels < 1) throw ArgumentError("synth_motion: channels must be >= 1");
    if (length < 1) throw ArgumentError("synth_motion: length must be >= 1");

    // Disjoint frequency bands (cycles/frame) keep the families separable by
    // a dominant-frequency probe; sitting is also lower-energy than walking.
    // Amplitude plus offset bound |x| by 1.3.
    const bool walk = family == SynthFamily::kSineWalk;
    const double f_lo = walk ? 0.020 : 0.004;
    const double f_hi = walk ? 0.050 : 0.012;
    const double a_lo = walk ? 0.40 : 0.10;
    const double a_hi = walk ? 1.00 : 0.35;

    Rng rng(seed ^ (walk ? 0x57414c4bull : 0x534954ull));  // family-tagged stream
    MotionSequence out;
    out.frames = nd::Matrix(length, channels);
    out.fps = 25.0;
    for (int c = 0; c < channels; ++c) {
        const double amp = rng.uniform(a_lo, a_hi);
        const double freq = rng.uniform(f_lo, f_hi);
        const double phase = rng.uniform(0.0, 2.0 * kPi);
        const double offset = rng.uniform(-0.3, 0.3);
        for (int t = 0; t < length; ++t)
            out.frames.at(t, c) = amp * std::sin(2.0 * kPi * freq * t + phase) + offset;
    }
    return out;
}

}  // namespace hs2s::motion
