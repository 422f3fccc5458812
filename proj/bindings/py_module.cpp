#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hs2s/checkpoint.hpp"
#include "hs2s/completion.hpp"
#include "hs2s/evalbench.hpp"
#include "hs2s/model.hpp"
#include "hs2s/pipeline.hpp"

namespace py = pybind11;
using namespace hs2s;

namespace {

nd::Matrix to_matrix(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2) throw ArgumentError("expected a 2-d array");
    nd::Matrix m(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
    std::copy_n(a.data(), m.data.size(), m.data.begin());
    return m;
}

py::array_t<double> from_matrix(const nd::Matrix& m) {
    py::array_t<double> out({m.rows, m.cols});
    std::copy_n(m.data.begin(), m.data.size(), out.mutable_data());
    return out;
}

py::array_t<double> from_vec(const nd::Vec& v) {
    return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

nd::Vec to_vec(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 1) throw ArgumentError("expected a 1-d array");
    return nd::Vec(a.data(), a.data() + a.shape(0));
}

}  // namespace

PYBIND11_MODULE(_hs2s, m) {
    m.doc() = "Hierarchical sequence-to-sequences autoencoder core";

    py::register_exception<ShapeError>(m, "ShapeError");
    py::register_exception<ArgumentError>(m, "ArgumentError");
    py::register_exception<FormatError>(m, "FormatError");
    py::register_exception<DataError>(m, "DataError");

    py::class_<model::ArchConfig>(m, "ArchConfig")
        .def(py::init<>())
        .def_readwrite("T", &model::ArchConfig::T)
        .def_readwrite("tau", &model::ArchConfig::tau)
        .def_readwrite("n", &model::ArchConfig::n)
        .def_readwrite("d", &model::ArchConfig::d)
        .def_readwrite("sub_hidden", &model::ArchConfig::sub_hidden)
        .def_readwrite("dec_hidden", &model::ArchConfig::dec_hidden)
        .def_property(
            "variant",
            [](const model::ArchConfig& c) {
                switch (c.variant) {
                    case model::Variant::kBasicPad: return "basic_pad";
                    case model::Variant::kHSeq2Seq: return "h_seq2seq";
                    default: return "hs2sae";
                }
            },
            [](model::ArchConfig& c, const std::string& v) {
                if (v == "hs2sae") c.variant = model::Variant::kHs2sae;
                else if (v == "basic_pad") c.variant = model::Variant::kBasicPad;
                else if (v == "h_seq2seq") c.variant = model::Variant::kHSeq2Seq;
                else throw ArgumentError("unknown variant " + v);
            })
        .def_property(
            "activation",
            [](const model::ArchConfig& c) {
                return c.act == nd::Activation::kTanh ? "tanh" : "linear";
            },
            [](model::ArchConfig& c, const std::string& v) {
                if (v == "tanh") c.act = nd::Activation::kTanh;
                else if (v == "linear") c.act = nd::Activation::kLinear;
                else throw ArgumentError("unknown activation " + v);
            });

    py::class_<model::ModelParams>(m, "ModelParams");
    py::class_<model::LatentCode>(m, "LatentCode")
        .def_property_readonly("z", [](const model::LatentCode& c) { return from_vec(c.z); })
        .def_readonly("prefix_len", &model::LatentCode::prefix_len);

    py::class_<model::TrainConfig>(m, "TrainConfig")
        .def(py::init<>())
        .def_readwrite("lr0", &model::TrainConfig::lr0)
        .def_readwrite("decay", &model::TrainConfig::decay)
        .def_readwrite("batch", &model::TrainConfig::batch)
        .def_readwrite("epochs", &model::TrainConfig::epochs)
        .def_readwrite("samples_per_epoch", &model::TrainConfig::samples_per_epoch)
        .def_readwrite("folds", &model::TrainConfig::folds)
        .def_readwrite("seed", &model::TrainConfig::seed)
        .def_readwrite("val_samples", &model::TrainConfig::val_samples);

    py::class_<motion::NormStats>(m, "NormStats")
        .def_property_readonly("kept", &motion::NormStats::kept_count)
        .def_property_readonly("mean",
                               [](const motion::NormStats& s) { return from_vec(s.mean); })
        .def_property_readonly("std",
                               [](const motion::NormStats& s) { return from_vec(s.stddev); });

    py::class_<completion::CompletionVector>(m, "CompletionVector")
        .def_readonly("j", &completion::CompletionVector::j)
        .def_readonly("sample_count", &completion::CompletionVector::sample_count)
        .def_property_readonly(
            "v", [](const completion::CompletionVector& c) { return from_vec(c.v); })
        .def_property_readonly(
            "sigma", [](const completion::CompletionVector& c) { return from_vec(c.sigma); });

    py::class_<completion::FnCompleter>(m, "FnCompleter")
        .def_readonly("trained_j", &completion::FnCompleter::trained_j);

    // --- core math ----------------------------------------------------------
    m.def("gru_step",
          [](py::array_t<double> wz, py::array_t<double> wr, py::array_t<double> wh,
             py::array_t<double> uz, py::array_t<double> ur, py::array_t<double> uh,
             py::array_t<double> bz, py::array_t<double> br, py::array_t<double> bh,
             py::array_t<double> x, py::array_t<double> h) {
              nd::GruParams p;
              p.Wz = to_matrix(wz); p.Wr = to_matrix(wr); p.Wh = to_matrix(wh);
              p.Uz = to_matrix(uz); p.Ur = to_matrix(ur); p.Uh = to_matrix(uh);
              const auto colv = [](py::array_t<double> a) {
                  const nd::Vec v = to_vec(a);
                  nd::Matrix m(static_cast<int>(v.size()), 1);
                  std::copy(v.begin(), v.end(), m.data.begin());
                  return m;
              };
              p.bz = colv(bz); p.br = colv(br); p.bh = colv(bh);
              p.hidden_dim = p.Wz.rows;
              p.input_dim = p.Wz.cols;
              return from_vec(nd::gru_step(p, to_vec(x), to_vec(h)));
          },
          "One GRU step h' = (1-z)h + z*cand");

    m.def("mae_loss", [](py::array_t<double> a, py::array_t<double> b) {
        return nd::mae_loss(to_matrix(a), to_matrix(b));
    });

    m.def("expmap_to_rotmat", [](py::array_t<double> r) {
        const nd::Vec v = to_vec(r);
        if (v.size() != 3) throw ArgumentError("expected a 3-vector");
        return from_matrix(motion::expmap_to_rotmat({v[0], v[1], v[2]}));
    });
    m.def("rotmat_to_euler", [](py::array_t<double> R) {
        const auto e = motion::rotmat_to_euler(to_matrix(R));
        return py::make_tuple(e[0], e[1], e[2]);
    });

    // --- data ----------------------------------------------------------------
    m.def("synth_motion",
          [](const std::string& family, int channels, int length, std::uint64_t seed) {
              const auto fam = family == "sine_walk" ? motion::SynthFamily::kSineWalk
                                                     : motion::SynthFamily::kSineSit;
              return from_matrix(motion::synth_motion(fam, channels, length, seed).frames);
          },
          py::arg("family"), py::arg("channels"), py::arg("length"), py::arg("seed"));

    m.def("compute_norm_stats",
          [](const std::vector<py::array_t<double>>& seqs, const std::string& scheme,
             double threshold) {
              std::vector<motion::MotionSequence> data;
              for (const auto& a : seqs) {
                  motion::MotionSequence s;
                  s.frames = to_matrix(a);
                  data.push_back(std::move(s));
              }
              return motion::compute_norm_stats(
                  data,
                  scheme == "unit_range" ? motion::NormScheme::kUnitRange
                                         : motion::NormScheme::kZscore,
                  threshold);
          },
          py::arg("sequences"), py::arg("scheme") = "zscore", py::arg("threshold") = 1e-4);

    m.def("normalize", [](py::array_t<double> frames, const motion::NormStats& stats,
                          bool inverse) {
        return from_matrix(motion::normalize(
            to_matrix(frames), stats,
            inverse ? motion::Direction::kInverse : motion::Direction::kForward));
    }, py::arg("frames"), py::arg("stats"), py::arg("inverse") = false);

    // --- model ---------------------------------------------------------------
    m.def("init_params", [](const model::ArchConfig& cfg, std::uint64_t seed) {
        return model::init_params(cfg, seed);
    });
    m.def("encode_prefix", [](const model::ModelParams& p, const model::ArchConfig& cfg,
                              py::array_t<double> x) {
        return model::encode_prefix(p, cfg, to_matrix(x));
    });
    m.def("decode", [](const model::ModelParams& p, const model::ArchConfig& cfg,
                       const model::LatentCode& z) {
        return from_matrix(model::decode(p, cfg, z));
    });
    m.def("multi_loss", [](const model::ModelParams& p, const model::ArchConfig& cfg,
                           py::array_t<double> w) {
        return model::multi_loss(p, cfg, to_matrix(w));
    });
    m.def("train_autoencoder",
          [](const std::vector<py::array_t<double>>& seqs, const model::ArchConfig& cfg,
             const model::TrainConfig& tc) {
              std::vector<motion::MotionSequence> data;
              for (const auto& a : seqs) {
                  motion::MotionSequence s;
                  s.frames = to_matrix(a);
                  s.fps = 25.0;
                  data.push_back(std::move(s));
              }
              auto result = model::train_autoencoder(data, cfg, tc);
              return py::make_tuple(std::move(result.params), from_vec(result.history.step_loss));
          },
          py::arg("sequences"), py::arg("cfg"), py::arg("tc"),
          "Returns (params, per-step loss history)");

    // --- completion ------------------------------------------------------------
    m.def("compute_vj",
          [](const model::ModelParams& p, const model::ArchConfig& cfg,
             const std::vector<py::array_t<double>>& windows, int j, const std::string& mode) {
              std::vector<motion::SampleWindow> ws;
              for (const auto& a : windows) {
                  motion::SampleWindow w;
                  w.full = to_matrix(a);
                  w.j = j;
                  w.prefix_len = j * cfg.tau;
                  ws.push_back(std::move(w));
              }
              return completion::compute_vj(p, cfg, ws, j,
                                            mode == "matching"
                                                ? completion::PairMode::kMatching
                                                : completion::PairMode::kCompletion);
          });
    m.def("complete_add", [](const model::LatentCode& z,
                             const completion::CompletionVector& cv,
                             const model::ArchConfig& cfg) {
        return completion::complete_add(z, cv, cfg);
    });
    m.def("predict_add", [](const model::ModelParams& p, const model::ArchConfig& cfg,
                            const completion::CompletionVector& cv, py::array_t<double> x) {
        completion::Completer comp;
        comp.add = &cv;
        return from_matrix(completion::predict_full(p, cfg, comp, to_matrix(x)));
    });
    m.def("interpolate", [](const model::ModelParams& p, const model::ArchConfig& cfg,
                            const model::LatentCode& a, const model::LatentCode& b, int k) {
        std::vector<py::array_t<double>> out;
        for (const auto& s : completion::interpolate(p, cfg, a, b, k))
            out.push_back(from_matrix(s));
        return out;
    });

    // --- evaluation ------------------------------------------------------------
    m.def("zero_velocity_predict", [](py::array_t<double> x, int horizon) {
        return from_matrix(eval::zero_velocity_predict(to_matrix(x), horizon));
    });
    m.def("mean_angle_error",
          [](py::array_t<double> pred, py::array_t<double> gt, const motion::NormStats& stats,
             const std::vector<int>& horizons, double fps, const std::string& metric) {
              return from_vec(eval::mean_angle_error(
                  to_matrix(pred), to_matrix(gt), stats, horizons, fps,
                  metric == "euclidean" ? eval::MetricKind::kEuclidean
                                        : eval::MetricKind::kAngle));
          },
          py::arg("pred"), py::arg("gt"), py::arg("stats"),
          py::arg("horizons") = std::vector<int>{80, 160, 320, 400}, py::arg("fps") = 25.0,
          py::arg("metric") = "angle");

    // --- persistence ------------------------------------------------------------
    m.def("save_checkpoint", [](const std::string& path, const model::ArchConfig& cfg,
                                const model::ModelParams& params) {
        io::Checkpoint ckpt;
        ckpt.cfg = cfg;
        ckpt.params = params;
        const int raw = cfg.d;
        ckpt.stats.mean.assign(raw, 0.0);
        ckpt.stats.stddev.assign(raw, 1.0);
        ckpt.stats.min.assign(raw, -1.0);
        ckpt.stats.max.assign(raw, 1.0);
        ckpt.stats.keep_mask.assign(raw, 1);
        io::save_checkpoint(path, ckpt);
    });
    m.def("load_checkpoint", [](const std::string& path) {
        auto ckpt = io::load_checkpoint(path);
        return py::make_tuple(ckpt.cfg, std::move(ckpt.params));
    });
}
