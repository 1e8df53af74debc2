#include "wireinspect/profile_io.hpp"

#include <openssl/evp.h>
#include <zlib.h>

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "wireinspect/error.hpp"

namespace wireinspect {

using nlohmann::json;

namespace {

[[noreturn]] void corrupt(const std::string& why) { throw Error(ErrorCode::CorruptProfile, why); }
[[noreturn]] void bad_config(const std::string& why) { throw Error(ErrorCode::InvalidConfig, why); }

json roi_json(const Roi& r) {
  return {{"x", r.x}, {"y", r.y}, {"width", r.width}, {"height", r.height}};
}

Roi roi_from(const json& j) {
  return {j.at("x").get<int>(), j.at("y").get<int>(), j.at("width").get<int>(),
          j.at("height").get<int>()};
}

json hsv_range_json(const HsvRange& r) {
  return {{"h_lo", r.h_lo}, {"h_hi", r.h_hi}, {"s_lo", r.s_lo},
          {"s_hi", r.s_hi}, {"v_lo", r.v_lo}, {"v_hi", r.v_hi}};
}

HsvRange hsv_range_from(const json& j) {
  HsvRange r;
  r.h_lo = j.at("h_lo").get<double>();
  r.h_hi = j.at("h_hi").get<double>();
  r.s_lo = j.at("s_lo").get<double>();
  r.s_hi = j.at("s_hi").get<double>();
  r.v_lo = j.at("v_lo").get<double>();
  r.v_hi = j.at("v_hi").get<double>();
  return r;
}

json gradient_json(const GradientConfig& g) {
  json shapes = json::array();
  for (const auto& t : g.templates) shapes.push_back({t.drift, t.thickness});
  return {{"grad_threshold", g.grad_threshold},
          {"sum_threshold_frac", g.sum_threshold_frac},
          {"seg_min_width", g.seg_min_width},
          {"seg_max_width", g.seg_max_width},
          {"template_width", g.template_width},
          {"overlap_accept", g.overlap_accept},
          {"combine_mode", std::string(to_string(g.combine_mode))},
          {"templates", shapes}};
}

void gradient_from(const json& j, GradientConfig& g) {
  g.grad_threshold = j.value("grad_threshold", g.grad_threshold);
  g.sum_threshold_frac = j.value("sum_threshold_frac", g.sum_threshold_frac);
  g.seg_min_width = j.value("seg_min_width", g.seg_min_width);
  g.seg_max_width = j.value("seg_max_width", g.seg_max_width);
  g.template_width = j.value("template_width", g.template_width);
  g.overlap_accept = j.value("overlap_accept", g.overlap_accept);
  if (j.contains("combine_mode")) {
    const auto mode = j.at("combine_mode").get<std::string>();
    if (mode == "or") {
      g.combine_mode = CombineMode::Or;
    } else if (mode == "and") {
      g.combine_mode = CombineMode::And;
    } else {
      bad_config("combine_mode must be 'or' or 'and'");
    }
  }
  if (j.contains("templates")) {
    g.templates.clear();
    for (const auto& t : j.at("templates")) {
      g.templates.push_back({t.at(0).get<int>(), t.at(1).get<int>()});
    }
  }
}

json orientation_json(const OrientationSpec& spec) {
  if (const auto* d = std::get_if<DistinctOrientation>(&spec)) {
    return {{"kind", "distinct"},
            {"connector_roi", roi_json(d->connector_roi)},
            {"similarity_threshold", d->similarity_threshold},
            {"min_edge_energy", d->min_edge_energy},
            {"reference", encode_doubles(d->reference.values)}};
  }
  const auto& s = std::get<SymmetricOrientation>(spec);
  return {{"kind", "symmetric"},
          {"marker_roi", roi_json(s.marker_roi)},
          {"marker_range", hsv_range_json(s.marker_range)},
          {"min_area_frac", s.min_area_frac},
          {"min_edge_energy", s.min_edge_energy}};
}

OrientationSpec orientation_from(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "distinct") {
    DistinctOrientation d;
    d.connector_roi = roi_from(j.at("connector_roi"));
    d.similarity_threshold = j.value("similarity_threshold", d.similarity_threshold);
    d.min_edge_energy = j.value("min_edge_energy", d.min_edge_energy);
    if (j.contains("reference")) {
      d.reference = EmbeddingVector::from_values(decode_doubles(j.at("reference").get<std::string>()));
    }
    return d;
  }
  if (kind == "symmetric") {
    SymmetricOrientation s;
    s.marker_roi = roi_from(j.at("marker_roi"));
    if (j.contains("marker_range")) s.marker_range = hsv_range_from(j.at("marker_range"));
    s.min_area_frac = j.value("min_area_frac", s.min_area_frac);
    s.min_edge_energy = j.value("min_edge_energy", s.min_edge_energy);
    return s;
  }
  bad_config("orientation kind must be 'distinct' or 'symmetric'");
}

json patch_json(const ReferencePatch& p) {
  return {{"wire_index", p.wire_index},
          {"width", p.width},
          {"height", p.height},
          {"hue_low_confidence", p.hue_low_confidence},
          {"mean_rgb", encode_doubles(p.mean_rgb)},
          {"mean_hsv", encode_doubles(p.mean_hsv)}};
}

ReferencePatch patch_from(const json& j) {
  ReferencePatch p;
  p.wire_index = j.at("wire_index").get<int>();
  p.width = j.at("width").get<int>();
  p.height = j.at("height").get<int>();
  p.hue_low_confidence = j.at("hue_low_confidence").get<bool>();
  p.mean_rgb = decode_doubles(j.at("mean_rgb").get<std::string>());
  p.mean_hsv = decode_doubles(j.at("mean_hsv").get<std::string>());
  return p;
}

json thresholds_json(const Thresholds& t) {
  return {{"t_match_rgb", t.t_match_rgb},
          {"t_mismatch_rgb", t.t_mismatch_rgb},
          {"t_match_hsv", t.t_match_hsv},
          {"t_mismatch_hsv", t.t_mismatch_hsv}};
}

Thresholds thresholds_from(const json& j) {
  return {j.at("t_match_rgb").get<double>(), j.at("t_mismatch_rgb").get<double>(),
          j.at("t_match_hsv").get<double>(), j.at("t_mismatch_hsv").get<double>()};
}

std::string hex32(std::uint32_t v) {
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", v);
  return buf;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) corrupt("base64 length is not a multiple of 4");
  std::vector<std::uint8_t> out(3 * (text.size() / 4));
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) corrupt("invalid base64 data");
  std::size_t pad = 0;
  if (!text.empty() && text.back() == '=') ++pad;
  if (text.size() > 1 && text[text.size() - 2] == '=') ++pad;
  out.resize(static_cast<std::size_t>(n) - pad);
  return out;
}

std::string encode_doubles(std::span<const double> values) {
  std::vector<std::uint8_t> bytes(values.size() * 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(values[i]);
    for (int b = 0; b < 8; ++b) bytes[8 * i + b] = static_cast<std::uint8_t>(bits >> (8 * b));
  }
  return base64_encode(bytes);
}

std::vector<double> decode_doubles(std::string_view text) {
  const auto bytes = base64_decode(text);
  if (bytes.size() % 8 != 0) corrupt("encoded raster is not a whole number of doubles");
  std::vector<double> out(bytes.size() / 8);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[8 * i + b]) << (8 * b);
    out[i] = std::bit_cast<double>(bits);
  }
  return out;
}

std::uint32_t crc32_of(std::string_view text) {
  return static_cast<std::uint32_t>(
      crc32(crc32(0L, Z_NULL, 0), reinterpret_cast<const Bytef*>(text.data()),
            static_cast<uInt>(text.size())));
}

json to_json(const ViewSpec& v) {
  json out = {{"view_id", v.view_id},
              {"roi", roi_json(v.roi)},
              {"expected_wires", v.expected_wires},
              {"bg_range", hsv_range_json(v.bg_range)},
              {"scan",
               {{"primary_top", v.scan.primary_top},
                {"primary_bottom", v.scan.primary_bottom},
                {"fallback_top", v.scan.fallback_top},
                {"fallback_bottom", v.scan.fallback_bottom}}},
              {"gradient", gradient_json(v.gradient)}};
  out["orientation"] = v.orientation ? orientation_json(*v.orientation) : json(nullptr);
  return out;
}

ViewSpec view_from_json(const json& j) {
  try {
    auto v = ViewSpec::with_defaults(j.at("view_id").get<std::string>(), roi_from(j.at("roi")),
                                     j.at("expected_wires").get<int>());
    if (j.contains("bg_range")) v.bg_range = hsv_range_from(j.at("bg_range"));
    if (j.contains("scan")) {
      const auto& s = j.at("scan");
      v.scan.primary_top = s.value("primary_top", v.scan.primary_top);
      v.scan.primary_bottom = s.value("primary_bottom", v.scan.primary_bottom);
      v.scan.fallback_top = s.value("fallback_top", v.scan.fallback_top);
      v.scan.fallback_bottom = s.value("fallback_bottom", v.scan.fallback_bottom);
    }
    if (j.contains("gradient")) gradient_from(j.at("gradient"), v.gradient);
    if (j.contains("orientation") && !j.at("orientation").is_null()) {
      v.orientation = orientation_from(j.at("orientation"));
    }
    v.validate();
    return v;
  } catch (const json::exception& e) {
    bad_config(std::string("view config: ") + e.what());
  }
}

ViewsConfig views_config_from_json(const json& j) {
  try {
    ViewsConfig cfg;
    cfg.harness_type = j.at("harness_type").get<std::string>();
    if (cfg.harness_type.empty()) bad_config("harness_type must not be empty");
    for (const auto& v : j.at("views")) cfg.views.push_back(view_from_json(v));
    if (cfg.views.empty()) bad_config("at least one view is required");
    return cfg;
  } catch (const json::exception& e) {
    bad_config(std::string("views config: ") + e.what());
  }
}

ViewsConfig load_views_config(const std::filesystem::path& path) {
  const auto text = read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    bad_config(path.string() + ": " + e.what());
  }
  return views_config_from_json(j);
}

json profile_body(const TrainedProfile& p) {
  json views = json::array();
  for (const auto& v : p.views) views.push_back(to_json(v));
  json refs = json::array();
  for (const auto& r : p.references) {
    json patches = json::array();
    for (const auto& patch : r.patches) patches.push_back(patch_json(patch));
    json th = json::array();
    for (const auto& t : r.thresholds) th.push_back(thresholds_json(t));
    refs.push_back({{"patches", patches},
                    {"thresholds", th},
                    {"nominal_wire_width", r.nominal_wire_width}});
  }
  return {{"format_version", p.format_version},
          {"profile_id", p.profile_id},
          {"harness_type", p.harness_type},
          {"extractor_version", p.extractor_version},
          {"patch_size", {{"width", p.patch_size.width}, {"height", p.patch_size.height}}},
          {"views", views},
          {"references", refs},
          {"created_at", p.created_at},
          {"sample_count", p.sample_count},
          {"sample_sources", p.sample_sources}};
}

std::string serialize_profile(const TrainedProfile& p) {
  auto doc = profile_body(p);
  const auto checksum = hex32(crc32_of(doc.dump()));
  doc["checksum"] = checksum;
  return doc.dump(2) + "\n";
}

TrainedProfile parse_profile(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    corrupt(std::string("profile is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("format_version") || !doc.contains("checksum")) {
    corrupt("profile lacks format_version or checksum");
  }
  try {
    const int version = doc.at("format_version").get<int>();
    if (version != kProfileFormatVersion) {
      throw Error(ErrorCode::FormatVersionUnsupported,
                  "profile format " + std::to_string(version) + " is not supported (expected " +
                      std::to_string(kProfileFormatVersion) + ")");
    }
    const auto stored = doc.at("checksum").get<std::string>();
    doc.erase("checksum");
    if (hex32(crc32_of(doc.dump())) != stored) corrupt("profile checksum mismatch");

    TrainedProfile p;
    p.format_version = version;
    p.profile_id = doc.at("profile_id").get<std::string>();
    p.harness_type = doc.at("harness_type").get<std::string>();
    p.extractor_version = doc.at("extractor_version").get<std::string>();
    p.patch_size = {doc.at("patch_size").at("width").get<int>(),
                    doc.at("patch_size").at("height").get<int>()};
    for (const auto& v : doc.at("views")) p.views.push_back(view_from_json(v));
    for (const auto& r : doc.at("references")) {
      ViewReference ref;
      for (const auto& patch : r.at("patches")) ref.patches.push_back(patch_from(patch));
      for (const auto& t : r.at("thresholds")) ref.thresholds.push_back(thresholds_from(t));
      ref.nominal_wire_width = r.at("nominal_wire_width").get<double>();
      p.references.push_back(std::move(ref));
    }
    p.created_at = doc.at("created_at").get<std::string>();
    p.sample_count = doc.at("sample_count").get<int>();
    p.sample_sources = doc.at("sample_sources").get<std::vector<std::string>>();
    p.validate();
    return p;
  } catch (const json::exception& e) {
    corrupt(std::string("malformed profile: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidConfig) corrupt(std::string("malformed profile: ") + e.what());
    throw;
  }
}

void save_profile(const TrainedProfile& p, const std::filesystem::path& path) {
  const auto text = serialize_profile(p);
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << text;
  if (!out.flush()) throw Error(ErrorCode::Io, "short write to " + path.string());
}

TrainedProfile load_profile(const std::filesystem::path& path) {
  return parse_profile(read_file(path));
}

std::filesystem::path profile_path(const std::filesystem::path& root, const TrainedProfile& p) {
  return root / p.harness_type / (p.profile_id + ".harnessprofile.json");
}

json to_json(const InspectionResult& r) {
  json views = json::array();
  json mismatched = json::array();
  for (std::size_t v = 0; v < r.views.size(); ++v) {
    const auto& view = r.views[v];
    json wires = json::array();
    for (const auto& w : view.wires) {
      wires.push_back({{"index", w.box.index},
                       {"box",
                        {{"x_left", w.box.x_left},
                         {"x_right", w.box.x_right},
                         {"y_top", w.box.y_top},
                         {"y_bottom", w.box.y_bottom}}},
                       {"mse_rgb", w.score.mse_rgb},
                       {"mse_hsv", w.score.mse_hsv},
                       {"verdict", std::string(to_string(w.verdict))}});
    }
    json orient = nullptr;
    if (view.orientation) {
      orient = {{"verdict", std::string(to_string(view.orientation->verdict))},
                {"score", view.orientation->score},
                {"detail", view.orientation->detail}};
    }
    views.push_back({{"view_id", view.view_id},
                     {"segmentation", std::string(to_string(view.segmentation))},
                     {"segmentation_detail", view.segmentation_detail},
                     {"placement_mismatch", view.placement_mismatch},
                     {"expected_wires", view.expected_wires},
                     {"observed_wires", view.observed_wires},
                     {"wires", wires},
                     {"orientation", orient},
                     {"verdict", std::string(to_string(view.verdict))}});
    mismatched.push_back(r.mismatched_wires(v));
  }
  return {{"profile_id", r.profile_id},
          {"overall", std::string(to_string(r.overall))},
          {"message", r.message},
          {"views", views},
          {"mismatched_wires", mismatched}};
}

}  // namespace wireinspect
