#include "hs2s/runconfig.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace hs2s::io {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

int to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const int out = std::stoi(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw ArgumentError("config key '" + key + "': bad integer '" + v + "'");
    }
}

long to_long(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const long out = std::stol(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw ArgumentError("config key '" + key + "': bad integer '" + v + "'");
    }
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double out = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw ArgumentError("config key '" + key + "': bad number '" + v + "'");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ArgumentError("config key '" + key + "': bad boolean '" + v + "'");
}

}  // namespace

void RunConfig::apply(const std::string& key, const std::string& value) {
    if (key == "T") T = to_int(key, value);
    else if (key == "tau") tau = to_int(key, value);
    else if (key == "latent_dim") latent_dim = to_int(key, value);
    else if (key == "sub_hidden") sub_hidden = to_int(key, value);
    else if (key == "dec_hidden") dec_hidden = to_int(key, value);
    else if (key == "activation") activation = value;
    else if (key == "variant") variant = value;
    else if (key == "seq_target") seq_target = value;
    else if (key == "fixed_j") fixed_j = to_int(key, value);
    else if (key == "lr0") lr0 = to_double(key, value);
    else if (key == "decay") decay = to_double(key, value);
    else if (key == "batch") batch = to_int(key, value);
    else if (key == "epochs") epochs = to_int(key, value);
    else if (key == "samples_per_epoch") samples_per_epoch = to_long(key, value);
    else if (key == "folds") folds = to_int(key, value);
    else if (key == "seed") seed = static_cast<std::uint64_t>(to_long(key, value));
    else if (key == "val_samples") val_samples = to_int(key, value);
    else if (key == "dataset") dataset = value;
    else if (key == "data_dir") data_dir = value;
    else if (key == "cache_path") cache_path = value;
    else if (key == "norm_scheme") norm_scheme = value;
    else if (key == "ignore_threshold") ignore_threshold = to_double(key, value);
    else if (key == "downsample") downsample = to_int(key, value);
    else if (key == "use_labels") use_labels = to_bool(key, value);
    else if (key == "test_subject") test_subject = to_int(key, value);
    else if (key == "synth_sequences") synth_sequences = to_int(key, value);
    else if (key == "synth_length") synth_length = to_int(key, value);
    else if (key == "synth_channels") synth_channels = to_int(key, value);
    else if (key == "out_dir") out_dir = value;
    else throw ArgumentError("unknown config key '" + key + "'");
}

std::string RunConfig::to_text() const {
    std::ostringstream out;
    char buf[40];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    out << "T = " << T << "\n";
    out << "tau = " << tau << "\n";
    out << "latent_dim = " << latent_dim << "\n";
    out << "sub_hidden = " << sub_hidden << "\n";
    out << "dec_hidden = " << dec_hidden << "\n";
    out << "activation = " << activation << "\n";
    out << "variant = " << variant << "\n";
    out << "seq_target = " << seq_target << "\n";
    out << "fixed_j = " << fixed_j << "\n";
    out << "lr0 = " << num(lr0) << "\n";
    out << "decay = " << num(decay) << "\n";
    out << "batch = " << batch << "\n";
    out << "epochs = " << epochs << "\n";
    out << "samples_per_epoch = " << samples_per_epoch << "\n";
    out << "folds = " << folds << "\n";
    out << "seed = " << seed << "\n";
    out << "val_samples = " << val_samples << "\n";
    out << "dataset = " << dataset << "\n";
    out << "data_dir = " << data_dir << "\n";
    out << "cache_path = " << cache_path << "\n";
    out << "norm_scheme = " << norm_scheme << "\n";
    out << "ignore_threshold = " << num(ignore_threshold) << "\n";
    out << "downsample = " << downsample << "\n";
    out << "use_labels = " << (use_labels ? "true" : "false") << "\n";
    out << "test_subject = " << test_subject << "\n";
    out << "synth_sequences = " << synth_sequences << "\n";
    out << "synth_length = " << synth_length << "\n";
    out << "synth_channels = " << synth_channels << "\n";
    out << "out_dir = " << out_dir << "\n";
    return out.str();
}

motion::NormScheme RunConfig::scheme() const {
    if (norm_scheme == "zscore") return motion::NormScheme::kZscore;
    if (norm_scheme == "unit_range") return motion::NormScheme::kUnitRange;
    throw ArgumentError("norm_scheme must be zscore or unit_range, got '" + norm_scheme + "'");
}

model::ArchConfig RunConfig::arch_config(int feature_dim) const {
    model::ArchConfig cfg;
    cfg.T = T;
    cfg.tau = tau;
    cfg.n = latent_dim;
    cfg.d = feature_dim;
    cfg.sub_hidden = sub_hidden;
    cfg.dec_hidden = dec_hidden;
    if (activation == "auto")
        cfg.act = scheme() == motion::NormScheme::kUnitRange ? nd::Activation::kTanh
                                                             : nd::Activation::kLinear;
    else if (activation == "tanh")
        cfg.act = nd::Activation::kTanh;
    else if (activation == "linear")
        cfg.act = nd::Activation::kLinear;
    else
        throw ArgumentError("activation must be auto, tanh or linear");

    if (variant == "hs2sae") cfg.variant = model::Variant::kHs2sae;
    else if (variant == "basic_pad") cfg.variant = model::Variant::kBasicPad;
    else if (variant == "h_seq2seq") cfg.variant = model::Variant::kHSeq2Seq;
    else throw ArgumentError("variant must be hs2sae, basic_pad or h_seq2seq");

    if (seq_target == "suffix") cfg.seq_target = model::SeqTarget::kSuffix;
    else if (seq_target == "full") cfg.seq_target = model::SeqTarget::kFullWindow;
    else throw ArgumentError("seq_target must be suffix or full");

    cfg.fixed_j = fixed_j > 0 ? fixed_j : std::max(1, T / tau - 1);
    cfg.validate();
    return cfg;
}

model::TrainConfig RunConfig::train_config() const {
    model::TrainConfig tc;
    tc.lr0 = lr0;
    tc.decay = decay;
    tc.batch = batch;
    tc.epochs = epochs;
    tc.samples_per_epoch = samples_per_epoch;
    tc.folds = folds;
    tc.seed = seed;
    tc.val_samples = val_samples;
    if (tc.lr0 <= 0 || tc.decay < 0 || tc.batch < 1 || tc.epochs < 0 ||
        tc.samples_per_epoch < 1 || tc.folds < 1)
        throw ArgumentError("training hyperparameters must be positive");
    return tc;
}

RunConfig parse_run_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ArgumentError("config line " + std::to_string(line_no) +
                                ": expected key = value");
        cfg.apply(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    if (cfg.data_dir.empty()) {
        const char* env = std::getenv("HS2S_DATA_DIR");
        if (env != nullptr) cfg.data_dir = env;
    }
    return cfg;
}

RunConfig parse_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_run_config_text(ss.str());
}

}  // namespace hs2s::io
