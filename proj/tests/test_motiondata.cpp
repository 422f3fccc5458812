#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "hs2s/motiondata.hpp"

using namespace hs2s;
using motion::Direction;
using motion::MotionSequence;
using motion::NormScheme;
using nd::Matrix;
using nd::Vec;

namespace {

namespace fs = std::filesystem;

constexpr double kPi = 3.14159265358979323846;

fs::path temp_dir() {
    const fs::path dir = fs::temp_directory_path() / "hs2s_motion_test";
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p);
    out << content;
}

// Quaternion-composition oracle: axis-angle -> unit quaternion -> rotation
// matrix, an independent route to the same rotation.
Matrix quat_rotmat(const std::array<double, 3>& r) {
    const double theta = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
    double w = 1.0, x = 0.0, y = 0.0, z = 0.0;
    if (theta > 0.0) {
        const double half = theta / 2.0;
        const double s = std::sin(half) / theta;
        w = std::cos(half);
        x = r[0] * s;
        y = r[1] * s;
        z = r[2] * s;
    }
    Matrix R(3, 3);
    R.at(0, 0) = 1 - 2 * (y * y + z * z);
    R.at(0, 1) = 2 * (x * y - z * w);
    R.at(0, 2) = 2 * (x * z + y * w);
    R.at(1, 0) = 2 * (x * y + z * w);
    R.at(1, 1) = 1 - 2 * (x * x + z * z);
    R.at(1, 2) = 2 * (y * z - x * w);
    R.at(2, 0) = 2 * (x * z - y * w);
    R.at(2, 1) = 2 * (y * z + x * w);
    R.at(2, 2) = 1 - 2 * (x * x + y * y);
    return R;
}

Matrix euler_compose(double yaw, double pitch, double roll) {
    const double ca = std::cos(yaw), sa = std::sin(yaw);
    const double cb = std::cos(pitch), sb = std::sin(pitch);
    const double cc = std::cos(roll), sc = std::sin(roll);
    Matrix R(3, 3);
    R.at(0, 0) = ca * cb;
    R.at(0, 1) = -sa * cc + ca * sb * sc;
    R.at(0, 2) = sa * sc + ca * sb * cc;
    R.at(1, 0) = sa * cb;
    R.at(1, 1) = ca * cc + sa * sb * sc;
    R.at(1, 2) = -ca * sc + sa * sb * cc;
    R.at(2, 0) = -sb;
    R.at(2, 1) = cb * sc;
    R.at(2, 2) = cb * cc;
    return R;
}

double mat_dist(const Matrix& a, const Matrix& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        worst = std::max(worst, std::abs(a.data[i] - b.data[i]));
    return worst;
}

// Grid-refinement oracle: search (yaw, pitch, roll) minimizing the
// reconstruction distance, refining around the best cell.
std::array<double, 3> euler_grid_search(const Matrix& R) {
    std::array<double, 3> best{0, 0, 0};
    double best_err = 1e100;
    double span_a = kPi, span_b = kPi / 2, span_c = kPi;
    double ca = 0, cb = 0, cc = 0;
    for (int level = 0; level < 8; ++level) {
        const int steps = 9;
        std::array<double, 3> level_best = best;
        for (int ia = -steps; ia <= steps; ++ia)
            for (int ib = -steps; ib <= steps; ++ib)
                for (int ic = -steps; ic <= steps; ++ic) {
                    const double a = ca + span_a * ia / steps;
                    const double b = cb + span_b * ib / steps;
                    const double c = cc + span_c * ic / steps;
                    const double err = mat_dist(euler_compose(a, b, c), R);
                    if (err < best_err) {
                        best_err = err;
                        level_best = {a, b, c};
                    }
                }
        best = level_best;
        ca = best[0];
        cb = best[1];
        cc = best[2];
        span_a /= steps;
        span_b /= steps;
        span_c /= steps;
    }
    return best;
}

// Tiny logistic probe on a scalar feature, gradient descent.
double logistic_probe_accuracy(const std::vector<double>& feat,
                               const std::vector<int>& label) {
    const int n = static_cast<int>(feat.size());
    const int half = n / 2;
    double w = 0.0, b = 0.0;
    for (int iter = 0; iter < 2000; ++iter) {
        double gw = 0.0, gb = 0.0;
        for (int i = 0; i < half; ++i) {
            const double p = 1.0 / (1.0 + std::exp(-(w * feat[i] + b)));
            gw += (p - label[i]) * feat[i];
            gb += (p - label[i]);
        }
        w -= 0.5 * gw / half;
        b -= 0.5 * gb / half;
    }
    int hits = 0;
    for (int i = half; i < n; ++i) {
        const double p = 1.0 / (1.0 + std::exp(-(w * feat[i] + b)));
        hits += (p > 0.5) == (label[i] == 1);
    }
    return static_cast<double>(hits) / (n - half);
}

// dominant frequency via zero crossings of the mean-removed channel
double dominant_freq(const MotionSequence& s) {
    double total = 0.0;
    for (int c = 0; c < s.frames.cols; ++c) {
        double mean = 0.0;
        for (int t = 0; t < s.frames.rows; ++t) mean += s.frames.at(t, c);
        mean /= s.frames.rows;
        int crossings = 0;
        for (int t = 1; t < s.frames.rows; ++t) {
            const double a = s.frames.at(t - 1, c) - mean;
            const double b = s.frames.at(t, c) - mean;
            if ((a < 0) != (b < 0)) ++crossings;
        }
        total += 0.5 * crossings / (s.frames.rows - 1);
    }
    return total / s.frames.cols;
}

}  // namespace

TEST_CASE("load_expmap_file") {
    const fs::path dir = temp_dir();
    SUBCASE("direct parse") {
        const fs::path p = dir / "basic.txt";
        write_file(p, "0,0,0\n1,2,3\n");
        const auto loaded = motion::load_expmap_file(p);
        CHECK(loaded.seq.frames.rows == 2);
        CHECK(loaded.seq.frames.cols == 3);
        CHECK(loaded.seq.fps == 50.0);
        CHECK(loaded.seq.frames.at(1, 2) == 3.0);
    }
    SUBCASE("empty file is a format error") {
        const fs::path p = dir / "empty.txt";
        write_file(p, "");
        CHECK_THROWS_AS(motion::load_expmap_file(p), FormatError);
    }
    SUBCASE("ragged rows carry the line number") {
        const fs::path p = dir / "ragged.txt";
        write_file(p, "1,2,3\n4,5\n");
        try {
            motion::load_expmap_file(p);
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(std::string(e.what()).find(":2") != std::string::npos);
        }
    }
    SUBCASE("non-numeric token") {
        const fs::path p = dir / "bad.txt";
        write_file(p, "1,x,3\n");
        CHECK_THROWS_AS(motion::load_expmap_file(p), FormatError);
    }
    SUBCASE("subject/action parsed from the path convention") {
        const fs::path sdir = dir / "S5";
        fs::create_directories(sdir);
        const fs::path p = sdir / "walking_1.txt";
        write_file(p, "1,2\n");
        const auto loaded = motion::load_expmap_file(p);
        CHECK(loaded.seq.subject == 5);
        CHECK(loaded.action_name == "walking");
    }
}

TEST_CASE("downsample") {
    MotionSequence s;
    s.frames = Matrix(10, 2);
    for (int t = 0; t < 10; ++t) s.frames.at(t, 0) = t;
    s.fps = 50.0;

    SUBCASE("factor 1 is identity") {
        const auto out = motion::downsample(s, 1);
        CHECK(out.frames.rows == 10);
        CHECK(out.fps == 50.0);
    }
    SUBCASE("keeps strided frames and divides fps") {
        const auto out = motion::downsample(s, 2);
        REQUIRE(out.frames.rows == 5);
        for (int t = 0; t < 5; ++t) CHECK(out.frames.at(t, 0) == 2 * t);
        CHECK(out.fps == 25.0);
    }
    SUBCASE("factor 0 rejected") {
        CHECK_THROWS_AS(motion::downsample(s, 0), ArgumentError);
    }
}

TEST_CASE("compute_norm_stats") {
    SUBCASE("constant channel dropped, population std") {
        MotionSequence s;
        s.frames = Matrix(2, 2);
        s.frames.at(0, 0) = 0.0;
        s.frames.at(1, 0) = 2.0;
        s.frames.at(0, 1) = 5.0;
        s.frames.at(1, 1) = 5.0;
        const auto st = motion::compute_norm_stats({s}, NormScheme::kZscore, 1e-4);
        CHECK(st.mean[0] == doctest::Approx(1.0));
        CHECK(st.stddev[0] == doctest::Approx(1.0));  // population convention
        CHECK(st.keep_mask[0] == 1);
        CHECK(st.keep_mask[1] == 0);
        CHECK(st.kept_count() == 1);
    }
    SUBCASE("empty set rejected") {
        CHECK_THROWS_AS(motion::compute_norm_stats({}, NormScheme::kZscore, 1e-4),
                        ArgumentError);
    }
    SUBCASE("keep_mask monotone in the threshold") {
        Rng rng(1);
        MotionSequence s;
        s.frames = Matrix(50, 6);
        for (auto& v : s.frames.data) v = rng.uniform(-1.0, 1.0);
        for (int t = 0; t < 50; ++t) s.frames.at(t, 2) *= 1e-3;  // one quiet channel
        double prev_kept = 7;
        for (double thr : {1e-6, 1e-3, 1e-1, 1.0}) {
            const auto st = motion::compute_norm_stats({s}, NormScheme::kZscore, thr);
            CHECK(st.kept_count() <= prev_kept);
            prev_kept = st.kept_count();
        }
    }
}

TEST_CASE("normalize round trips") {
    Rng rng(9);
    MotionSequence s;
    s.frames = Matrix(40, 5);
    for (auto& v : s.frames.data) v = rng.uniform(-2.0, 3.0);
    for (int t = 0; t < 40; ++t) s.frames.at(t, 3) = 0.25;  // constant -> dropped

    for (const auto scheme : {NormScheme::kZscore, NormScheme::kUnitRange}) {
        const auto st = motion::compute_norm_stats({s}, scheme, 1e-4);
        const Matrix fwd = motion::normalize(s.frames, st, Direction::kForward);
        CHECK(fwd.cols == st.kept_count());

        if (scheme == NormScheme::kZscore) {
            // training set itself: mean 0, std 1 per kept channel
            for (int c = 0; c < fwd.cols; ++c) {
                double mean = 0.0, var = 0.0;
                for (int t = 0; t < fwd.rows; ++t) mean += fwd.at(t, c);
                mean /= fwd.rows;
                for (int t = 0; t < fwd.rows; ++t)
                    var += (fwd.at(t, c) - mean) * (fwd.at(t, c) - mean);
                var /= fwd.rows;
                CHECK(std::abs(mean) < 1e-12);
                CHECK(std::sqrt(var) == doctest::Approx(1.0).epsilon(1e-10));
            }
        } else {
            for (double v : fwd.data) {
                CHECK(v >= -1.0 - 1e-12);
                CHECK(v <= 1.0 + 1e-12);
            }
        }

        const Matrix back = motion::normalize(fwd, st, Direction::kInverse);
        REQUIRE(back.cols == s.frames.cols);
        for (int t = 0; t < back.rows; ++t)
            for (int c = 0; c < back.cols; ++c)
                if (st.keep_mask[c])
                    CHECK(std::abs(back.at(t, c) - s.frames.at(t, c)) <= 1e-10);
                else
                    CHECK(back.at(t, c) == doctest::Approx(st.mean[c]));
    }
}

TEST_CASE("append_label") {
    motion::LabelVocab vocab;
    vocab.names = {"walk", "sit"};
    Matrix frames(3, 4, 0.5);

    SUBCASE("one-hot appended") {
        const Matrix out = motion::append_label(frames, 1, vocab);
        CHECK(out.cols == 6);
        for (int t = 0; t < 3; ++t) {
            CHECK(out.at(t, 4) == 0.0);
            CHECK(out.at(t, 5) == 1.0);
            CHECK(out.at(t, 0) == 0.5);
        }
    }
    SUBCASE("masked id appends zeros") {
        const Matrix out = motion::append_label(frames, motion::LabelVocab::kMasked, vocab);
        for (int t = 0; t < 3; ++t) {
            CHECK(out.at(t, 4) == 0.0);
            CHECK(out.at(t, 5) == 0.0);
        }
    }
    SUBCASE("out-of-range label rejected") {
        CHECK_THROWS_AS(motion::append_label(frames, 2, vocab), ArgumentError);
    }
}

TEST_CASE("window_sample") {
    MotionSequence s;
    s.frames = Matrix(12, 2);
    for (int t = 0; t < 12; ++t) s.frames.at(t, 0) = t;

    SUBCASE("length == T forces start 0 and still draws exactly once") {
        MotionSequence exact = s;
        exact.frames = Matrix(8, 2);
        for (int t = 0; t < 8; ++t) exact.frames.at(t, 0) = t;
        Rng rng(5), ref(5);
        (void)ref.next_u64();  // the one draw window_sample should consume
        const auto w = motion::window_sample(exact, 8, 2, 2, rng);
        CHECK(w.full.at(0, 0) == 0.0);
        CHECK(rng.next_u64() == ref.next_u64());
    }
    SUBCASE("j = T/tau gives X = full") {
        Rng rng(5);
        const auto w = motion::window_sample(s, 8, 4, 2, rng);
        CHECK(w.prefix_len == 8);
        const Matrix x = w.prefix();
        for (std::size_t i = 0; i < x.data.size(); ++i) CHECK(x.data[i] == w.full.data[i]);
        CHECK(w.suffix().rows == 0);
    }
    SUBCASE("fixed seed reproduces the window") {
        Rng a(123), b(123);
        const auto wa = motion::window_sample(s, 8, 2, 2, a);
        const auto wb = motion::window_sample(s, 8, 2, 2, b);
        CHECK(wa.full.data == wb.full.data);
    }
    SUBCASE("short sequence rejected") {
        Rng rng(5);
        CHECK_THROWS_AS(motion::window_sample(s, 16, 2, 2, rng), ArgumentError);
    }
}

TEST_CASE("expmap_to_rotmat") {
    SUBCASE("zero vector gives identity") {
        const Matrix R = motion::expmap_to_rotmat({0, 0, 0});
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) CHECK(R.at(i, j) == (i == j ? 1.0 : 0.0));
    }
    SUBCASE("quarter turn about z") {
        const Matrix R = motion::expmap_to_rotmat({0, 0, kPi / 2});
        CHECK(R.at(0, 0) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(R.at(0, 1) == doctest::Approx(-1.0));
        CHECK(R.at(1, 0) == doctest::Approx(1.0));
        CHECK(R.at(2, 2) == doctest::Approx(1.0));
    }
    SUBCASE("matches the quaternion oracle to 1e-10") {
        Rng rng(17);
        for (int trial = 0; trial < 500; ++trial) {
            std::array<double, 3> r{rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0),
                                    rng.uniform(-3.0, 3.0)};
            CHECK(mat_dist(motion::expmap_to_rotmat(r), quat_rotmat(r)) <= 1e-10);
        }
    }
    SUBCASE("always orthonormal with unit determinant") {
        Rng rng(23);
        for (int trial = 0; trial < 200; ++trial) {
            std::array<double, 3> r{rng.uniform(-6.0, 6.0), rng.uniform(-6.0, 6.0),
                                    rng.uniform(-6.0, 6.0)};
            const Matrix R = motion::expmap_to_rotmat(r);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    double dot = 0.0;
                    for (int k = 0; k < 3; ++k) dot += R.at(k, i) * R.at(k, j);
                    CHECK(std::abs(dot - (i == j ? 1.0 : 0.0)) <= 1e-9);
                }
            const double det =
                R.at(0, 0) * (R.at(1, 1) * R.at(2, 2) - R.at(1, 2) * R.at(2, 1)) -
                R.at(0, 1) * (R.at(1, 0) * R.at(2, 2) - R.at(1, 2) * R.at(2, 0)) +
                R.at(0, 2) * (R.at(1, 0) * R.at(2, 1) - R.at(1, 1) * R.at(2, 0));
            CHECK(std::abs(det - 1.0) <= 1e-9);
        }
    }
}

TEST_CASE("rotmat_to_euler") {
    SUBCASE("identity maps to zero angles") {
        Matrix I(3, 3);
        I.at(0, 0) = I.at(1, 1) = I.at(2, 2) = 1.0;
        const auto e = motion::rotmat_to_euler(I);
        CHECK(e[0] == 0.0);
        CHECK(e[1] == 0.0);
        CHECK(e[2] == 0.0);
    }
    SUBCASE("round trip at matrix level to 1e-8") {
        Rng rng(31);
        for (int trial = 0; trial < 300; ++trial) {
            std::array<double, 3> r{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0),
                                    rng.uniform(-2.0, 2.0)};
            const Matrix R = motion::expmap_to_rotmat(r);
            if (std::abs(R.at(2, 0)) >= 1.0 - 1e-6) continue;  // skip gimbal lock
            const auto e = motion::rotmat_to_euler(R);
            CHECK(mat_dist(euler_compose(e[0], e[1], e[2]), R) <= 1e-8);
        }
    }
    SUBCASE("matches the grid-refinement oracle") {
        Rng rng(37);
        int done = 0;
        for (int trial = 0; done < 5 && trial < 50; ++trial) {
            std::array<double, 3> r{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                                    rng.uniform(-1.0, 1.0)};
            const Matrix R = motion::expmap_to_rotmat(r);
            if (std::abs(R.at(2, 0)) >= 0.95) continue;
            const auto want = euler_grid_search(R);
            const auto got = motion::rotmat_to_euler(R);
            // the oracle minimizes reconstruction error; compare at matrix level
            CHECK(mat_dist(euler_compose(got[0], got[1], got[2]),
                           euler_compose(want[0], want[1], want[2])) <= 1e-6);
            ++done;
        }
        CHECK(done == 5);
    }
    SUBCASE("gimbal lock pins roll to zero and still reconstructs") {
        const Matrix R = euler_compose(0.7, kPi / 2, 0.3);
        const auto e = motion::rotmat_to_euler(R);
        CHECK(e[2] == 0.0);
        CHECK(mat_dist(euler_compose(e[0], e[1], e[2]), R) <= 1e-8);
    }
    SUBCASE("non-orthonormal inputs rejected") {
        Matrix bad(3, 3, 0.5);
        CHECK_THROWS_AS(motion::rotmat_to_euler(bad), ArgumentError);
    }
}

TEST_CASE("synth_motion") {
    SUBCASE("deterministic per arguments") {
        const auto a = motion::synth_motion(motion::SynthFamily::kSineWalk, 4, 50, 7);
        const auto b = motion::synth_motion(motion::SynthFamily::kSineWalk, 4, 50, 7);
        CHECK(a.frames.data == b.frames.data);
        CHECK(a.fps == 25.0);
    }
    SUBCASE("bounded amplitude") {
        const auto s = motion::synth_motion(motion::SynthFamily::kSineSit, 6, 200, 3);
        for (double v : s.frames.data) CHECK(std::abs(v) <= 1.3);
    }
    SUBCASE("logistic probe separates the families at 200 samples") {
        std::vector<double> feat;
        std::vector<int> label;
        for (int i = 0; i < 100; ++i) {
            feat.push_back(dominant_freq(
                motion::synth_motion(motion::SynthFamily::kSineWalk, 8, 120, 1000 + i)));
            label.push_back(1);
            feat.push_back(dominant_freq(
                motion::synth_motion(motion::SynthFamily::kSineSit, 8, 120, 2000 + i)));
            label.push_back(0);
        }
        CHECK(logistic_probe_accuracy(feat, label) > 0.95);
    }
}
