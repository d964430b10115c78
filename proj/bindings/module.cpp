#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "sentry/engine.hpp"
#include "sentry/metrics.hpp"
#include "sentry/simgen.hpp"

namespace py = pybind11;
using namespace sentry;

namespace {

Zone zone_from_dict(const py::dict& d) {
  const auto kind = d["kind"].cast<std::string>();
  if (kind == "circle") {
    Circle c;
    c.center = {d["x"].cast<double>(), d["y"].cast<double>()};
    c.radius = d["r"].cast<double>();
    return c;
  }
  if (kind == "polygon") {
    ConvexPolygon p;
    for (const auto& v : d["vertices"])
      p.vertices.push_back({v.cast<py::sequence>()[0].cast<double>(),
                            v.cast<py::sequence>()[1].cast<double>()});
    return p;
  }
  throw std::invalid_argument("zone kind must be 'circle' or 'polygon'");
}

}  // namespace

PYBIND11_MODULE(sentrylab, m) {
  m.doc() = "Surveillance sentry core: tracking, features, classifier, simulator";

  py::class_<Position>(m, "Position")
      .def(py::init<>())
      .def(py::init([](double x, double y) { return Position{x, y}; }), py::arg("x"), py::arg("y"))
      .def_readwrite("x", &Position::x)
      .def_readwrite("y", &Position::y)
      .def("__repr__", [](const Position& p) {
        return "Position(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")";
      });

  m.def("distance", &distance, py::arg("a"), py::arg("b"));
  m.def(
      "zone_contains",
      [](const py::dict& zone, const Position& p) { return contains(zone_from_dict(zone), p); },
      py::arg("zone"), py::arg("p"));

  py::class_<TrackSample>(m, "TrackSample")
      .def(py::init([](double t, const Position& p) { return TrackSample{t, p}; }), py::arg("t"),
           py::arg("position"))
      .def_readwrite("timestamp", &TrackSample::timestamp)
      .def_readwrite("position", &TrackSample::position);

  py::class_<Track>(m, "Track")
      .def(py::init<>())
      .def_readwrite("object_id", &Track::object_id)
      .def_readonly("history", &Track::history)
      .def("append", &Track::append, py::arg("timestamp"), py::arg("position"));

  py::class_<ZoneEntry>(m, "ZoneEntry")
      .def(py::init([](ObjectId id, const Position& p, double t) { return ZoneEntry{id, p, t}; }),
           py::arg("object_id"), py::arg("entry_point"), py::arg("entry_time"))
      .def_readwrite("object_id", &ZoneEntry::object_id)
      .def_readwrite("entry_point", &ZoneEntry::entry_point)
      .def_readwrite("entry_time", &ZoneEntry::entry_time);

  m.def("path_length", &path_length, py::arg("track"), py::arg("from_time"));
  m.def("inefficiency_index", &inefficiency_index, py::arg("track"), py::arg("entry"),
        py::arg("cap") = 100.0);
  m.def("logistic", &logistic, py::arg("net"));
  m.def(
      "roc_auc",
      [](const std::vector<std::pair<double, int>>& scored) { return roc_auc(scored); },
      py::arg("scored"));

  py::class_<Frame>(m, "Frame")
      .def(py::init<>())
      .def_readwrite("timestamp", &Frame::timestamp)
      .def(
          "add_blip",
          [](Frame& f, double x, double y) { f.blips.push_back({{x, y}, f.timestamp}); },
          py::arg("x"), py::arg("y"))
      .def("blip_positions", [](const Frame& f) {
        std::vector<std::pair<double, double>> out;
        for (const auto& b : f.blips) out.emplace_back(b.position.x, b.position.y);
        return out;
      });

  m.def("frame_to_jsonl", &frame_to_jsonl, py::arg("frame"));
  m.def("frame_from_jsonl", [](const std::string& s) { return frame_from_jsonl(s); },
        py::arg("line"));

  py::class_<SomParams>(m, "SomParams")
      .def(py::init<>())
      .def_readwrite("alpha0", &SomParams::alpha0)
      .def_readwrite("alpha_tau", &SomParams::alpha_tau)
      .def_readwrite("sigma0", &SomParams::sigma0)
      .def_readwrite("sigma_tau", &SomParams::sigma_tau)
      .def_readwrite("steps", &SomParams::steps);

  py::class_<SomGrid>(m, "SomGrid")
      .def_static("lattice", &SomGrid::lattice, py::arg("width"), py::arg("height"),
                  py::arg("width_m"), py::arg("height_m"))
      .def_static("random", &SomGrid::random, py::arg("width"), py::arg("height"),
                  py::arg("width_m"), py::arg("height_m"), py::arg("seed"))
      .def("bmu", &SomGrid::bmu, py::arg("p"))
      .def("train_step", &SomGrid::train_step, py::arg("p"), py::arg("params"))
      .def(
          "quantization_error",
          [](const SomGrid& g, const std::vector<Position>& pts) {
            return g.quantization_error(pts);
          },
          py::arg("points"));

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("batch_size", &TrainConfig::batch_size);

  py::class_<LabeledExample>(m, "LabeledExample")
      .def(py::init<>())
      .def_readwrite("input", &LabeledExample::input)
      .def_readwrite("target", &LabeledExample::target)
      .def_readwrite("mask", &LabeledExample::mask);

  py::class_<Mlp>(m, "Mlp")
      .def(py::init<std::size_t, std::size_t, std::size_t>(), py::arg("input_dim"),
           py::arg("hidden_dim"), py::arg("output_dim"))
      .def_static("random", &Mlp::random, py::arg("input_dim"), py::arg("hidden_dim"),
                  py::arg("output_dim"), py::arg("seed"))
      .def_property_readonly("input_dim", &Mlp::input_dim)
      .def_property_readonly("hidden_dim", &Mlp::hidden_dim)
      .def_property_readonly("output_dim", &Mlp::output_dim)
      .def(
          "forward",
          [](const Mlp& m, const std::vector<double>& x) { return m.forward(x); },
          py::arg("input"))
      .def("loss", &Mlp::loss, py::arg("example"))
      .def(
          "train",
          [](Mlp& m, const std::vector<LabeledExample>& data, const TrainConfig& cfg) {
            m.train(data, cfg);
          },
          py::arg("data"), py::arg("config"))
      .def("save",
           [](const Mlp& m, const std::string& path) {
             std::ofstream out(path);
             if (!out) throw std::runtime_error("cannot open " + path);
             m.save(out);
           })
      .def_static("load", [](const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open " + path);
        return Mlp::load(in);
      });

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def(py::init<>())
      .def_readwrite("area_width", &ScenarioConfig::area_width)
      .def_readwrite("area_height", &ScenarioConfig::area_height)
      .def_readwrite("target", &ScenarioConfig::target)
      .def_readwrite("n_benign", &ScenarioConfig::n_benign)
      .def_readwrite("n_hostile", &ScenarioConfig::n_hostile)
      .def_readwrite("noise_sigma", &ScenarioConfig::noise_sigma)
      .def_readwrite("dt", &ScenarioConfig::dt)
      .def_readwrite("duration", &ScenarioConfig::duration)
      .def_readwrite("act_radius", &ScenarioConfig::act_radius)
      .def_readwrite("drop_prob", &ScenarioConfig::drop_prob)
      .def_readwrite("seed", &ScenarioConfig::seed);

  py::class_<TruthObject>(m, "TruthObject")
      .def_readonly("id", &TruthObject::id)
      .def_readonly("hostile", &TruthObject::hostile)
      .def_readonly("trajectory", &TruthObject::trajectory)
      .def_readonly("act_time", &TruthObject::act_time);

  py::class_<GroundTruth>(m, "GroundTruth")
      .def_readonly("objects", &GroundTruth::objects)
      .def_readonly("correspondence", &GroundTruth::correspondence);

  m.def("generate", &generate, py::arg("config"));

  py::class_<LabelParams>(m, "LabelParams")
      .def(py::init<>())
      .def_readwrite("max_objects", &LabelParams::max_objects)
      .def_readwrite("target", &LabelParams::target);

  m.def("label_examples", &label_examples, py::arg("frames"), py::arg("truth"),
        py::arg("params"));

  py::class_<AlertEvent>(m, "AlertEvent")
      .def_readonly("object_id", &AlertEvent::object_id)
      .def_readonly("timestamp", &AlertEvent::timestamp)
      .def_readonly("p", &AlertEvent::p)
      .def_property_readonly("source",
                             [](const AlertEvent& a) { return to_string(a.source); });

  py::class_<MissEvent>(m, "MissEvent")
      .def_readonly("object_id", &MissEvent::object_id)
      .def_readonly("act_time", &MissEvent::act_time)
      .def_readonly("first_alert_time", &MissEvent::first_alert_time);

  py::class_<RunReport::ObjectRow>(m, "ObjectRow")
      .def_readonly("object_id", &RunReport::ObjectRow::object_id)
      .def_readonly("max_p", &RunReport::ObjectRow::max_p)
      .def_readonly("hostile", &RunReport::ObjectRow::hostile)
      .def_readonly("first_alert_time", &RunReport::ObjectRow::first_alert_time)
      .def_readonly("zone_entry_time", &RunReport::ObjectRow::zone_entry_time);

  py::class_<RunReport>(m, "RunReport")
      .def_readonly("alerts", &RunReport::alerts)
      .def_readonly("misses", &RunReport::misses)
      .def_readonly("objects", &RunReport::objects)
      .def_readonly("frames_processed", &RunReport::frames_processed);

  py::class_<EngineConfig>(m, "EngineConfig")
      .def(py::init<>())
      .def_readwrite("target", &EngineConfig::target)
      .def_readwrite("theta", &EngineConfig::theta)
      .def_readwrite("max_objects", &EngineConfig::max_objects)
      .def_readwrite("gate", &EngineConfig::gate)
      .def_readwrite("coast_limit", &EngineConfig::coast_limit)
      .def(
          "set_target_zone",
          [](EngineConfig& c, const py::dict& zone) { c.target_zone = zone_from_dict(zone); },
          py::arg("zone"));

  py::class_<Engine>(m, "Engine")
      .def(py::init<EngineConfig, Mlp>(), py::arg("config"), py::arg("model"))
      .def("attach_truth_labels", &Engine::attach_truth_labels, py::arg("truth"),
           py::keep_alive<1, 2>())
      .def(
          "run",
          [](Engine& e, const std::vector<Frame>& frames) { return e.run(frames, nullptr); },
          py::arg("frames"));
}
