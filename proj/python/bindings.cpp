#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dtreason/error.hpp"
#include "dtreason/script.hpp"
#include "dtreason/session.hpp"
#include "dtreason/tree.hpp"

namespace py = pybind11;

namespace {

nlohmann::json parse_json(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw dtr::Error(dtr::ErrorKind::Parse, std::string("invalid JSON: ") + e.what());
  }
}

std::unique_ptr<dtr::Session> make_session(const std::string& metadata) {
  return std::make_unique<dtr::Session>(dtr::parse_metadata(parse_json(metadata)));
}

std::string solve_json(const dtr::Session& s, std::vector<std::string> project,
                       std::optional<std::string> minimize) {
  dtr::Answer a;
  {
    py::gil_scoped_release release;
    a = s.solveopt({std::move(project), std::move(minimize)});
  }
  return dtr::answer_to_json(a).dump();
}

std::string solve_text(const dtr::Session& s, std::vector<std::string> project,
                       std::optional<std::string> minimize) {
  dtr::Answer a;
  {
    py::gil_scoped_release release;
    a = s.solveopt({std::move(project), std::move(minimize)});
  }
  return dtr::render_text(a);
}

py::tuple predict(const std::string& metadata, const std::string& tree,
                  const std::map<std::string, std::string>& point) {
  auto features = dtr::parse_metadata(parse_json(metadata));
  auto t = dtr::parse_tree(parse_json(tree), features);
  dtr::NamedPoint p;
  for (const auto& f : features) {
    auto it = point.find(f.name);
    if (it == point.end()) throw dtr::Error(dtr::ErrorKind::Validation, "point lacks feature '" + f.name + "'");
    if (f.kind == dtr::FeatureKind::Nominal) {
      p[f.name] = it->second;
    } else {
      p[f.name] = dtr::Rat::parse(it->second);
    }
  }
  auto r = dtr::predict(t, p);
  return py::make_tuple(r.label, r.confidence.str());
}

py::tuple run_script(const std::string& text, const std::string& base_dir, const std::string& format) {
  dtr::ScriptRunner runner(format == "json" ? dtr::OutputFormat::Json : dtr::OutputFormat::Text, base_dir);
  std::string out;
  auto err = dtr::run_script(runner, text, out);
  return py::make_tuple(out, err ? py::object(py::str(err->str())) : py::object(py::none()));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Decision-tree explanations with linear constraint reasoning";

  static py::exception<dtr::Error> error(m, "ReasonError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const dtr::Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error)(e.what());
      exc.attr("kind") = std::string(dtr::error_kind_name(e.kind()));
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  py::class_<dtr::Session>(m, "Session")
      .def(py::init(&make_session), py::arg("metadata"))
      .def("declare_model", [](dtr::Session& s, const std::string& doc) { return s.declare_model(parse_json(doc)); })
      .def("declare_instance", [](dtr::Session& s, const std::string& name, const std::string& model,
                                  const std::string& label, const std::string& minconf) {
             s.declare_instance(name, model, label, dtr::Rat::parse(minconf));
           },
           py::arg("name"), py::arg("model_id"), py::arg("label"), py::arg("minconf") = "0")
      .def("add_constraint", &dtr::Session::add_constraint)
      .def("remove_constraint", &dtr::Session::remove_constraint)
      .def("undo", &dtr::Session::undo)
      .def("reset", &dtr::Session::reset)
      .def("solve_json", &solve_json, py::arg("project") = std::vector<std::string>{},
           py::arg("minimize") = py::none())
      .def("solve_text", &solve_text, py::arg("project") = std::vector<std::string>{},
           py::arg("minimize") = py::none())
      .def("state_json", [](const dtr::Session& s) { return s.state_json().dump(); })
      .def("script", &dtr::Session::script);

  m.def("predict", &predict, py::arg("metadata"), py::arg("tree"), py::arg("point"));
  m.def("run_script", &run_script, py::arg("text"), py::arg("base_dir") = "", py::arg("format") = "text");

#ifdef VERSION_INFO
  m.attr("__version__") = VERSION_INFO;
#else
  m.attr("__version__") = "dev";
#endif
}
