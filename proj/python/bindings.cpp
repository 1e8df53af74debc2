#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "wireinspect/error.hpp"
#include "wireinspect/png_io.hpp"
#include "wireinspect/profile.hpp"
#include "wireinspect/profile_io.hpp"
#include "wireinspect/synth.hpp"

namespace py = pybind11;
using namespace wireinspect;

namespace {

using Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

RgbImage to_image(const Array& a) {
  if (a.ndim() != 3 || a.shape(2) != 3) {
    throw Error(ErrorCode::ShapeMismatch, "expected an H x W x 3 uint8 array");
  }
  const auto h = static_cast<int>(a.shape(0));
  const auto w = static_cast<int>(a.shape(1));
  std::vector<std::uint8_t> data(a.data(), a.data() + a.size());
  return RgbImage(w, h, std::move(data));
}

Array to_array(const RgbImage& img) {
  Array out({img.height(), img.width(), 3});
  std::memcpy(out.mutable_data(), img.data().data(), img.data().size());
  return out;
}

nlohmann::json parse(const std::string& text) { return nlohmann::json::parse(text); }

std::string boxes_json(const std::vector<WireBox>& boxes) {
  auto out = nlohmann::json::array();
  for (const auto& b : boxes) {
    out.push_back({{"index", b.index},
                   {"x_left", b.x_left},
                   {"x_right", b.x_right},
                   {"y_top", b.y_top},
                   {"y_bottom", b.y_bottom}});
  }
  return out.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Wire harness colour-sequence inspection (native core)";

  // Kept alive for the life of the interpreter; instances carry a `code`
  // attribute holding the error code name.
  static py::handle error_type = py::exception<Error>(m, "Error").release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = error_type(e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  m.def("read_png", [](const std::string& path) { return to_array(read_png(path)); });
  m.def("write_png", [](const Array& img, const std::string& path) { write_png(to_image(img), path); });

  m.def(
      "generate",
      [](const std::string& spec_json, const std::string& variant) {
        const auto spec = synth::apply_variant(synth::spec_from_json(parse(spec_json)),
                                               synth::parse_variant(variant));
        const auto r = synth::generate(spec);
        return py::make_tuple(to_array(r.frame), boxes_json(r.truth.boxes),
                              std::string(to_string(r.truth.orientation)));
      },
      py::arg("spec_json"), py::arg("variant") = "none");
  m.def("expected_verdict", [](const std::string& spec_json, const std::string& variant) {
    return synth::expected_verdict(synth::spec_from_json(parse(spec_json)),
                                   synth::parse_variant(variant));
  });
  m.def("connector_roi", [](const std::string& spec_json) {
    const auto r = synth::connector_roi(synth::spec_from_json(parse(spec_json)));
    return py::make_tuple(r.x, r.y, r.width, r.height);
  });

  m.def(
      "segment",
      [](const Array& cropped, int expected_wires) {
        const auto img = to_image(cropped);
        const auto seg = segment_wires(img, HsvRange::default_background(),
                                       ScanLineConfig::for_height(img.height()), expected_wires,
                                       GradientConfig::for_layout(img.width(), expected_wires));
        return py::make_tuple(std::string(to_string(seg.path)), boxes_json(seg.boxes), seg.detail);
      },
      py::arg("cropped"), py::arg("expected_wires"));

  py::class_<TrainedProfile>(m, "Profile")
      .def_property_readonly("profile_id", [](const TrainedProfile& p) { return p.profile_id; })
      .def_property_readonly("harness_type", [](const TrainedProfile& p) { return p.harness_type; })
      .def_property_readonly("sample_count", [](const TrainedProfile& p) { return p.sample_count; })
      .def("serialize", [](const TrainedProfile& p) { return serialize_profile(p); })
      .def("save", [](const TrainedProfile& p, const std::string& path) { save_profile(p, path); })
      .def_static("parse", [](const std::string& text) { return parse_profile(text); })
      .def_static("load", [](const std::string& path) { return load_profile(path); })
      .def("__eq__", [](const TrainedProfile& a, const TrainedProfile& b) { return a == b; });

  m.def(
      "train",
      [](const std::string& views_config_json, const std::vector<std::vector<Array>>& samples,
         const std::string& profile_id) {
        const auto cfg = views_config_from_json(parse(views_config_json));
        std::vector<std::vector<RgbImage>> frames;
        for (const auto& per_view : samples) {
          auto& dst = frames.emplace_back();
          for (const auto& a : per_view) dst.push_back(to_image(a));
        }
        TrainOptions opts;
        opts.profile_id = profile_id;
        py::gil_scoped_release release;
        return train(cfg.harness_type, cfg.views, frames, opts);
      },
      py::arg("views_config_json"), py::arg("samples"), py::arg("profile_id") = "");

  m.def(
      "inspect",
      [](const std::vector<Array>& frames, const TrainedProfile& profile) {
        std::vector<RgbImage> images;
        for (const auto& a : frames) images.push_back(to_image(a));
        InspectionResult r;
        {
          py::gil_scoped_release release;
          r = inspect(images, profile);
        }
        return to_json(r).dump();
      },
      py::arg("frames"), py::arg("profile"));
}
