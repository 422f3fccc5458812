#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

// Exercises the installed binary end to end through std::system; the binary
// path arrives via the HS2S_CLI environment variable set by ctest.

namespace {

namespace fs = std::filesystem;

std::string cli() {
    const char* env = std::getenv("HS2S_CLI");
    REQUIRE_MESSAGE(env != nullptr, "HS2S_CLI must point at the hs2s binary");
    return env;
}

int run(const std::string& args) {
    const int status = std::system((cli() + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
}

fs::path write_config(const std::string& name, const std::string& extra) {
    const fs::path dir = fs::temp_directory_path() / "hs2s_cli_test";
    fs::create_directories(dir);
    const fs::path path = dir / name;
    std::ofstream out(path);
    out << "T = 20\ntau = 5\nlatent_dim = 8\nsub_hidden = 8\ndec_hidden = 8\n"
        << "batch = 4\nepochs = 1\nsamples_per_epoch = 16\nval_samples = 4\n"
        << "lr0 = 5e-3\ndataset = sine_walk\nnorm_scheme = unit_range\n"
        << "synth_sequences = 8\nsynth_length = 80\nsynth_channels = 3\n"
        << "out_dir = " << (dir / "out").string() << "\n" << extra;
    return path;
}

}  // namespace

TEST_CASE("usage errors exit 2") {
    CHECK(run("") == 2);
    CHECK(run("no-such-command") == 2);
    CHECK(run("evaluate --bogus-flag 1") == 2);
    CHECK(run("fit-completion") == 2);  // missing required options
}

TEST_CASE("help exits 0") {
    CHECK(run("--help") == 0);
}

TEST_CASE("train, fit, evaluate, interpolate round trip on a tiny config") {
    const fs::path dir = fs::temp_directory_path() / "hs2s_cli_test";
    const auto cfg = write_config("tiny.cfg", "");
    const auto ckpt = (dir / "model.hs2s").string();

    CHECK(run("train-ae --config " + cfg.string() + " --ckpt " + ckpt) == 0);
    CHECK(fs::exists(ckpt));
    CHECK(run("fit-completion --config " + cfg.string() + " --ckpt " + ckpt +
              " --mode both --target completion --j 2 --samples 32") == 0);
    CHECK(run("evaluate --config " + cfg.string() + " --predictor zero-velocity" +
              " --input-frames 10 --output-frames 10") == 0);
    CHECK(run("evaluate --config " + cfg.string() + " --predictor add --ckpt " + ckpt +
              " --input-frames 10 --output-frames 10") == 0);
    CHECK(run("predict --config " + cfg.string() + " --ckpt " + ckpt +
              " --completer fn --j 2") == 0);
    CHECK(run("generate --config " + cfg.string() + " --ckpt " + ckpt +
              " --noise-scale 0.5 --count 2 --j 2") == 0);

    SUBCASE("interpolate --steps 8 emits 9 motion files") {
        const fs::path out = dir / "out";
        std::error_code ec;
        for (int i = 0; i < 16; ++i) fs::remove(out / ("interp_" + std::to_string(i) + ".txt"), ec);
        CHECK(run("interpolate --config " + cfg.string() + " --ckpt " + ckpt +
                  " --steps 8") == 0);
        int produced = 0;
        for (int i = 0; i < 16; ++i)
            if (fs::exists(out / ("interp_" + std::to_string(i) + ".txt"))) ++produced;
        CHECK(produced == 9);
    }

    SUBCASE("report renders the csv outputs") {
        CHECK(run("report --dir " + (dir / "out").string()) == 0);
    }
}

TEST_CASE("data and model errors exit 1") {
    const auto cfg = write_config("tiny2.cfg", "");
    CHECK(run("predict --config " + cfg.string() + " --ckpt /nonexistent.hs2s") == 1);
    const auto badcfg = write_config("bad.cfg", "dataset = human36m\ndata_dir = /nonexistent\n");
    CHECK(run("train-ae --config " + badcfg.string()) == 1);
}

TEST_CASE("deterministic reruns produce byte-identical artifacts") {
    const fs::path dir = fs::temp_directory_path() / "hs2s_cli_det";
    fs::create_directories(dir);
    auto make_cfg = [&](const std::string& out) {
        const fs::path path = dir / (out + ".cfg");
        std::ofstream f(path);
        f << "T = 8\ntau = 2\nlatent_dim = 8\nsub_hidden = 8\ndec_hidden = 8\n"
          << "batch = 4\nepochs = 1\nsamples_per_epoch = 16\nval_samples = 4\n"
          << "lr0 = 5e-3\ndataset = sine_walk\nnorm_scheme = unit_range\n"
          << "synth_sequences = 8\nsynth_length = 60\nsynth_channels = 3\nseed = 11\n"
          << "out_dir = " << (dir / out).string() << "\n";
        return path;
    };
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), {});
    };
    const auto cfg1 = make_cfg("run1");
    const auto cfg2 = make_cfg("run2");
    REQUIRE(run("train-ae --config " + cfg1.string() + " --ckpt " + (dir / "m1.hs2s").string()) == 0);
    REQUIRE(run("train-ae --config " + cfg2.string() + " --ckpt " + (dir / "m2.hs2s").string()) == 0);
    CHECK(slurp(dir / "m1.hs2s") == slurp(dir / "m2.hs2s"));
    CHECK(slurp(dir / "run1" / "loss_history.csv") == slurp(dir / "run2" / "loss_history.csv"));
}
