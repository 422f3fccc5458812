#include "hs2s/checkpoint.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace hs2s::io {

namespace {

constexpr char kMagic[4] = {'H', 'S', '2', 'S'};

std::uint64_t fnv1a(const std::uint8_t* data, std::size_t len, std::uint64_t h) {
    for (std::size_t i = 0; i < len; ++i) {
        h ^= data[i];
        h *= 0x100000001B3ull;
    }
    return h;
}
constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;

class Writer {
  public:
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f32(float v) {
        std::uint32_t bits;
        std::memcpy(&bits, &v, 4);
        u32(bits);
    }
    void raw(const void* p, std::size_t n) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        bytes_.insert(bytes_.end(), b, b + n);
    }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        raw(s.data(), s.size());
    }
    const std::vector<std::uint8_t>& bytes() const { return bytes_; }

  private:
    std::vector<std::uint8_t> bytes_;
};

class Reader {
  public:
    Reader(const std::uint8_t* data, std::size_t len) : data_(data), len_(len) {}
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_ + i]) << (8 * i);
        pos_ += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
        pos_ += 8;
        return v;
    }
    float f32() {
        const std::uint32_t bits = u32();
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }
    std::string str() {
        const std::uint32_t n = u32();
        need(n);
        std::string s(reinterpret_cast<const char*>(data_ + pos_), n);
        pos_ += n;
        return s;
    }
    std::size_t pos() const { return pos_; }
    void need(std::size_t n) const {
        if (pos_ + n > len_) throw CorruptionError("container truncated");
    }

  private:
    const std::uint8_t* data_;
    std::size_t len_;
    std::size_t pos_ = 0;
};

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string join_doubles(const nd::Vec& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += fmt_double(v[i]);
    }
    return out;
}

nd::Vec split_doubles(const std::string& s) {
    nd::Vec out;
    std::istringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

const std::string& header_get(const Container& c, const std::string& key) {
    auto it = c.header.find(key);
    if (it == c.header.end()) throw StructureError("missing header key '" + key + "'");
    return it->second;
}

}  // namespace

const Block* Container::find(const std::string& name) const {
    for (const auto& b : blocks)
        if (b.name == name) return &b;
    return nullptr;
}

void Container::add(const std::string& name, const nd::Matrix& m) {
    Block b;
    b.name = name;
    b.dims = {static_cast<std::uint32_t>(m.rows), static_cast<std::uint32_t>(m.cols)};
    b.data.reserve(m.data.size());
    for (double v : m.data) b.data.push_back(static_cast<float>(v));
    blocks.push_back(std::move(b));
}

void Container::add(const std::string& name, const nd::Vec& v) {
    Block b;
    b.name = name;
    b.dims = {static_cast<std::uint32_t>(v.size())};
    b.data.reserve(v.size());
    for (double x : v) b.data.push_back(static_cast<float>(x));
    blocks.push_back(std::move(b));
}

nd::Matrix Container::matrix(const std::string& name) const {
    const Block* b = find(name);
    if (b == nullptr) throw StructureError("missing block '" + name + "'");
    if (b->dims.size() != 2) throw StructureError("block '" + name + "' is not rank 2");
    nd::Matrix m(static_cast<int>(b->dims[0]), static_cast<int>(b->dims[1]));
    for (std::size_t i = 0; i < b->data.size(); ++i) m.data[i] = b->data[i];
    return m;
}

nd::Vec Container::vec(const std::string& name) const {
    const Block* b = find(name);
    if (b == nullptr) throw StructureError("missing block '" + name + "'");
    if (b->dims.size() != 1) throw StructureError("block '" + name + "' is not rank 1");
    return nd::Vec(b->data.begin(), b->data.end());
}

void save_container(const std::filesystem::path& path, const Container& c) {
    Writer w;
    w.raw(kMagic, 4);
    w.u32(kContainerVersion);

    std::map<std::string, std::string> header = c.header;
    {
        std::string manifest;
        for (const auto& b : c.blocks) {
            if (!manifest.empty()) manifest += ' ';
            manifest += b.name;
        }
        header["manifest"] = manifest;
    }
    std::string text;
    for (const auto& [k, v] : header) text += k + "=" + v + "\n";
    w.str(text);

    w.u32(static_cast<std::uint32_t>(c.blocks.size()));
    for (const auto& b : c.blocks) {
        w.str(b.name);
        w.u32(static_cast<std::uint32_t>(b.dims.size()));
        std::size_t total = 1;
        for (auto d : b.dims) {
            w.u32(d);
            total *= d;
        }
        if (total != b.data.size())
            throw StructureError("block '" + b.name + "' dims do not match data size");
        for (float v : b.data) w.f32(v);
    }

    const std::uint64_t checksum = fnv1a(w.bytes().data(), w.bytes().size(), kFnvOffset);
    w.u64(checksum);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(w.bytes().data()),
              static_cast<std::streamsize>(w.bytes().size()));
    if (!out) throw DataError("write failed for " + path.string());
}

Container load_container(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());

    if (bytes.size() < 4 + 4 + 4 + 4 + 8) throw CorruptionError("container too short");
    if (std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw FormatError("bad magic, not an HS2S container");

    const std::uint64_t stored = [&] {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(bytes[bytes.size() - 8 + i]) << (8 * i);
        return v;
    }();
    const std::uint64_t computed = fnv1a(bytes.data(), bytes.size() - 8, kFnvOffset);
    if (stored != computed) throw CorruptionError("checksum mismatch");

    Reader r(bytes.data(), bytes.size() - 8);
    r.u32();  // magic, already checked
    const std::uint32_t version = r.u32();
    if (version != kContainerVersion)
        throw VersionError("container version " + std::to_string(version) +
                           ", expected " + std::to_string(kContainerVersion));

    Container c;
    {
        const std::string text = r.str();
        std::istringstream ss(text);
        std::string line;
        while (std::getline(ss, line)) {
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw FormatError("bad header line: " + line);
            c.header[line.substr(0, eq)] = line.substr(eq + 1);
        }
    }

    const std::uint32_t count = r.u32();
    for (std::uint32_t i = 0; i < count; ++i) {
        Block b;
        b.name = r.str();
        const std::uint32_t rank = r.u32();
        if (rank > 8) throw CorruptionError("implausible block rank");
        std::size_t total = 1;
        for (std::uint32_t d = 0; d < rank; ++d) {
            b.dims.push_back(r.u32());
            total *= b.dims.back();
        }
        if (total > (1u << 30)) throw CorruptionError("implausible block size");
        b.data.reserve(total);
        for (std::size_t k = 0; k < total; ++k) b.data.push_back(r.f32());
        c.blocks.push_back(std::move(b));
    }

    // manifest must name exactly the blocks present, in order
    const std::string manifest = header_get(c, "manifest");
    std::vector<std::string> names;
    {
        std::istringstream ss(manifest);
        std::string tok;
        while (ss >> tok) names.push_back(tok);
    }
    if (names.size() != c.blocks.size())
        throw StructureError("manifest lists " + std::to_string(names.size()) +
                             " blocks, file has " + std::to_string(c.blocks.size()));
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] != c.blocks[i].name)
            throw StructureError("manifest/block order mismatch at '" + names[i] + "'");
    return c;
}

namespace {

const char* variant_name(model::Variant v) {
    switch (v) {
        case model::Variant::kHs2sae: return "hs2sae";
        case model::Variant::kBasicPad: return "basic_pad";
        case model::Variant::kHSeq2Seq: return "h_seq2seq";
    }
    return "?";
}

model::Variant variant_from(const std::string& s) {
    if (s == "hs2sae") return model::Variant::kHs2sae;
    if (s == "basic_pad") return model::Variant::kBasicPad;
    if (s == "h_seq2seq") return model::Variant::kHSeq2Seq;
    throw FormatError("unknown variant '" + s + "'");
}

void put_stats(Container& c, const motion::NormStats& st, const std::string& prefix) {
    c.header[prefix + "scheme"] =
        st.scheme == motion::NormScheme::kZscore ? "zscore" : "unit_range";
    c.header[prefix + "ignore_threshold"] = fmt_double(st.ignore_threshold);
    c.header[prefix + "mean"] = join_doubles(st.mean);
    c.header[prefix + "std"] = join_doubles(st.stddev);
    c.header[prefix + "min"] = join_doubles(st.min);
    c.header[prefix + "max"] = join_doubles(st.max);
    std::string mask;
    for (auto k : st.keep_mask) mask += k ? '1' : '0';
    c.header[prefix + "keep_mask"] = mask;
}

motion::NormStats get_stats(const Container& c, const std::string& prefix) {
    motion::NormStats st;
    const std::string scheme = header_get(c, prefix + "scheme");
    if (scheme == "zscore")
        st.scheme = motion::NormScheme::kZscore;
    else if (scheme == "unit_range")
        st.scheme = motion::NormScheme::kUnitRange;
    else
        throw FormatError("unknown normalization scheme '" + scheme + "'");
    st.ignore_threshold = std::stod(header_get(c, prefix + "ignore_threshold"));
    st.mean = split_doubles(header_get(c, prefix + "mean"));
    st.stddev = split_doubles(header_get(c, prefix + "std"));
    st.min = split_doubles(header_get(c, prefix + "min"));
    st.max = split_doubles(header_get(c, prefix + "max"));
    for (char ch : header_get(c, prefix + "keep_mask")) st.keep_mask.push_back(ch == '1');
    if (st.stddev.size() != st.mean.size() || st.keep_mask.size() != st.mean.size())
        throw StructureError("inconsistent normalization statistics");
    return st;
}

void put_vocab(Container& c, const motion::LabelVocab& vocab) {
    std::string joined;
    for (std::size_t i = 0; i < vocab.names.size(); ++i) {
        if (i) joined += ',';
        joined += vocab.names[i];
    }
    c.header["vocab"] = joined;
}

motion::LabelVocab get_vocab(const Container& c) {
    motion::LabelVocab vocab;
    auto it = c.header.find("vocab");
    if (it == c.header.end() || it->second.empty()) return vocab;
    std::istringstream ss(it->second);
    std::string tok;
    while (std::getline(ss, tok, ',')) vocab.names.push_back(tok);
    return vocab;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    Container c;
    c.header["kind"] = "checkpoint";
    c.header["arch.T"] = std::to_string(ckpt.cfg.T);
    c.header["arch.tau"] = std::to_string(ckpt.cfg.tau);
    c.header["arch.n"] = std::to_string(ckpt.cfg.n);
    c.header["arch.d"] = std::to_string(ckpt.cfg.d);
    c.header["arch.sub_hidden"] = std::to_string(ckpt.cfg.sub_hidden);
    c.header["arch.dec_hidden"] = std::to_string(ckpt.cfg.dec_hidden);
    c.header["arch.activation"] =
        ckpt.cfg.act == nd::Activation::kTanh ? "tanh" : "linear";
    c.header["arch.variant"] = variant_name(ckpt.cfg.variant);
    c.header["arch.seq_target"] =
        ckpt.cfg.seq_target == model::SeqTarget::kSuffix ? "suffix" : "full";
    c.header["arch.fixed_j"] = std::to_string(ckpt.cfg.fixed_j);
    put_stats(c, ckpt.stats, "stats.");
    put_vocab(c, ckpt.vocab);

    auto& params = const_cast<model::ModelParams&>(ckpt.params);
    for (const auto& ref : model::param_set(params)) c.add("param." + ref.name, *ref.value);

    c.header["add.count"] = std::to_string(ckpt.add_completers.size());
    for (std::size_t i = 0; i < ckpt.add_completers.size(); ++i) {
        const auto& cv = ckpt.add_completers[i];
        const std::string prefix = "add." + std::to_string(i);
        c.header[prefix + ".j"] = std::to_string(cv.j);
        c.header[prefix + ".mode"] = completion::pair_mode_name(cv.mode);
        c.header[prefix + ".samples"] = std::to_string(cv.sample_count);
        c.add(prefix + ".v", cv.v);
        c.add(prefix + ".sigma", cv.sigma);
    }
    c.header["fn.count"] = std::to_string(ckpt.fn_completers.size());
    for (std::size_t i = 0; i < ckpt.fn_completers.size(); ++i) {
        const auto& fn = ckpt.fn_completers[i];
        const std::string prefix = "fn." + std::to_string(i);
        c.header[prefix + ".j"] = std::to_string(fn.trained_j);
        c.header[prefix + ".mode"] = completion::pair_mode_name(fn.mode);
        c.add(prefix + ".weight", fn.layer.weight);
        c.add(prefix + ".bias", fn.layer.bias);
    }
    save_container(path, c);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    const Container c = load_container(path);
    if (header_get(c, "kind") != "checkpoint")
        throw StructureError(path.string() + " is not a model checkpoint");

    Checkpoint ckpt;
    ckpt.cfg.T = std::stoi(header_get(c, "arch.T"));
    ckpt.cfg.tau = std::stoi(header_get(c, "arch.tau"));
    ckpt.cfg.n = std::stoi(header_get(c, "arch.n"));
    ckpt.cfg.d = std::stoi(header_get(c, "arch.d"));
    ckpt.cfg.sub_hidden = std::stoi(header_get(c, "arch.sub_hidden"));
    ckpt.cfg.dec_hidden = std::stoi(header_get(c, "arch.dec_hidden"));
    ckpt.cfg.act = header_get(c, "arch.activation") == "tanh" ? nd::Activation::kTanh
                                                              : nd::Activation::kLinear;
    ckpt.cfg.variant = variant_from(header_get(c, "arch.variant"));
    ckpt.cfg.seq_target = header_get(c, "arch.seq_target") == "suffix"
                              ? model::SeqTarget::kSuffix
                              : model::SeqTarget::kFullWindow;
    ckpt.cfg.fixed_j = std::stoi(header_get(c, "arch.fixed_j"));
    ckpt.cfg.validate();
    ckpt.stats = get_stats(c, "stats.");
    ckpt.vocab = get_vocab(c);

    ckpt.params = model::zero_params(ckpt.cfg);
    for (const auto& ref : model::param_set(ckpt.params)) {
        const nd::Matrix stored = c.matrix("param." + ref.name);
        if (stored.rows != ref.value->rows || stored.cols != ref.value->cols)
            throw StructureError("block 'param." + ref.name + "' has unexpected shape");
        *ref.value = stored;
    }
    // restore activations that zero_params cannot know
    ckpt.params.pose1.act = ckpt.cfg.act;
    ckpt.params.pose2.act = ckpt.cfg.act;
    ckpt.params.res_out.act = ckpt.cfg.act;

    const int add_count = std::stoi(header_get(c, "add.count"));
    for (int i = 0; i < add_count; ++i) {
        const std::string prefix = "add." + std::to_string(i);
        completion::CompletionVector cv;
        cv.j = std::stoi(header_get(c, prefix + ".j"));
        const std::string mode = header_get(c, prefix + ".mode");
        cv.mode = mode == "completion" ? completion::PairMode::kCompletion
                  : mode == "matching" ? completion::PairMode::kMatching
                                       : completion::PairMode::kLabelRecovery;
        cv.sample_count = std::stol(header_get(c, prefix + ".samples"));
        cv.v = c.vec(prefix + ".v");
        cv.sigma = c.vec(prefix + ".sigma");
        ckpt.add_completers.push_back(std::move(cv));
    }
    const int fn_count = std::stoi(header_get(c, "fn.count"));
    for (int i = 0; i < fn_count; ++i) {
        const std::string prefix = "fn." + std::to_string(i);
        completion::FnCompleter fn;
        fn.trained_j = std::stoi(header_get(c, prefix + ".j"));
        const std::string mode = header_get(c, prefix + ".mode");
        fn.mode = mode == "completion" ? completion::PairMode::kCompletion
                  : mode == "matching" ? completion::PairMode::kMatching
                                       : completion::PairMode::kLabelRecovery;
        fn.layer.weight = c.matrix(prefix + ".weight");
        fn.layer.bias = c.matrix(prefix + ".bias");
        fn.layer.act = nd::Activation::kLinear;
        ckpt.fn_completers.push_back(std::move(fn));
    }
    return ckpt;
}

void save_dataset(const std::filesystem::path& path, const DatasetCache& ds) {
    Container c;
    c.header["kind"] = "dataset";
    put_stats(c, ds.stats, "stats.");
    put_vocab(c, ds.vocab);
    auto put_split = [&](const std::vector<motion::MotionSequence>& seqs,
                         const std::string& split) {
        c.header["dataset." + split + ".count"] = std::to_string(seqs.size());
        for (std::size_t i = 0; i < seqs.size(); ++i) {
            const std::string prefix = "dataset." + split + "." + std::to_string(i);
            c.header[prefix + ".fps"] = fmt_double(seqs[i].fps);
            c.header[prefix + ".action"] = std::to_string(seqs[i].action);
            c.header[prefix + ".subject"] = std::to_string(seqs[i].subject);
            c.add(prefix + ".frames", seqs[i].frames);
        }
    };
    put_split(ds.train, "train");
    put_split(ds.test, "test");
    save_container(path, c);
}

DatasetCache load_dataset(const std::filesystem::path& path) {
    const Container c = load_container(path);
    if (header_get(c, "kind") != "dataset")
        throw StructureError(path.string() + " is not a dataset cache");
    DatasetCache ds;
    ds.stats = get_stats(c, "stats.");
    ds.vocab = get_vocab(c);
    auto get_split = [&](const std::string& split) {
        std::vector<motion::MotionSequence> seqs;
        const int count = std::stoi(header_get(c, "dataset." + split + ".count"));
        for (int i = 0; i < count; ++i) {
            const std::string prefix = "dataset." + split + "." + std::to_string(i);
            motion::MotionSequence s;
            s.fps = std::stod(header_get(c, prefix + ".fps"));
            s.action = std::stoi(header_get(c, prefix + ".action"));
            s.subject = std::stoi(header_get(c, prefix + ".subject"));
            s.frames = c.matrix(prefix + ".frames");
            seqs.push_back(std::move(s));
        }
        return seqs;
    };
    ds.train = get_split("train");
    ds.test = get_split("test");
    return ds;
}

void write_motion_text(const std::filesystem::path& path, const nd::Matrix& frames) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    char buf[40];
    for (int t = 0; t < frames.rows; ++t) {
        const double* row = frames.row(t);
        for (int c = 0; c < frames.cols; ++c) {
            std::snprintf(buf, sizeof buf, "%.9g", row[c]);
            if (c) out << ',';
            out << buf;
        }
        out << "\n";
    }
}

}  // namespace hs2s::io
