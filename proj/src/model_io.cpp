#include "polyobs/model_io.hpp"

#include "polyobs/errors.hpp"

namespace polyobs {

namespace {

Dims dims_from_json(const json& j) {
  if (!j.contains("dims")) throw IoError("model: missing 'dims'");
  const json& d = j["dims"];
  Dims out;
  auto get = [&](const char* k) {
    if (!d.contains(k) || !d[k].is_number_integer() || d[k].get<int>() < 0)
      throw IoError(std::string("model: dims.") + k + " must be a nonnegative integer");
    return d[k].get<int>();
  };
  out.n_x = get("n_x");
  out.n_u = get("n_u");
  out.n_y = get("n_y");
  out.n_v = get("n_v");
  out.n_w = get("n_w");
  out.n_phi = get("n_phi");
  return out;
}

}  // namespace

LoadedModel model_from_json(const json& j) {
  if (!j.is_object()) throw IoError("model: expected a JSON object");
  const Dims d = dims_from_json(j);

  if (!j.contains("parameter_box") || !j["parameter_box"].is_object())
    throw IoError("model: missing 'parameter_box'");
  const json& box = j["parameter_box"];
  if (!box.contains("lower") || !box.contains("upper"))
    throw IoError("model: parameter_box needs 'lower' and 'upper'");
  const Vector lower = vector_from_json(box["lower"], "parameter_box.lower");
  const Vector upper = vector_from_json(box["upper"], "parameter_box.upper", lower.size());
  if (lower.size() < 1) throw IoError("model: parameter_box must have at least one axis");

  // lower == upper exactly declares a single-point parameter set (N = 1).
  CoordinateMap map = (lower - upper).cwiseAbs().maxCoeff() == 0.0
                          ? CoordinateMap::single_point(lower)
                          : CoordinateMap::partition_box(lower, upper);

  if (!j.contains("vertices") || !j["vertices"].is_array() || j["vertices"].empty())
    throw IoError("model: missing or empty 'vertices'");
  const int N = static_cast<int>(j["vertices"].size());
  if (N != map.num_vertices())
    throw IoError("model: " + std::to_string(N) + " vertices listed but the parameter box partition has " +
                  std::to_string(map.num_vertices()));

  Matrix H = matrix_from_json(j.value("H", json::array()), "H", d.n_phi, d.n_x);
  Matrix C = matrix_from_json(j.value("C", json::array()), "C", d.n_y, d.n_x);
  Matrix D = matrix_from_json(j.value("D", json::array()), "D", d.n_y, d.n_w);
  Matrix Lambda = matrix_from_json(j.value("Lambda", json::array()), "Lambda", d.n_phi, d.n_phi);
  if (!j.contains("nonlinearity") || !j["nonlinearity"].is_string())
    throw IoError("model: missing 'nonlinearity' name");
  const std::string phi_id = j["nonlinearity"].get<std::string>();

  const bool continuous = j.value("continuous", false);

  LoadedModel out{std::nullopt, std::nullopt, map};
  if (continuous) {
    ContinuousModel cm;
    cm.dims = d;
    cm.H = H;
    cm.C = C;
    cm.D = D;
    cm.Lambda = Lambda;
    cm.nonlinearity_id = phi_id;
    for (int i = 0; i < N; ++i) {
      const json& v = j["vertices"][i];
      const std::string at = "vertices[" + std::to_string(i) + "]";
      ContinuousVertexBundle b;
      b.E = matrix_from_json(v.value("E", json::array()), at + ".E", d.n_x, d.n_x);
      b.A = matrix_from_json(v.value("A", json::array()), at + ".A", d.n_x, d.n_x);
      b.B = matrix_from_json(v.value("B", json::array()), at + ".B", d.n_x, d.n_u);
      b.F = matrix_from_json(v.value("F", json::array()), at + ".F", d.n_x, d.n_v);
      b.G = matrix_from_json(v.value("G", json::array()), at + ".G", d.n_x, d.n_phi);
      cm.vertices.push_back(std::move(b));
    }
    out.continuous = std::move(cm);
    return out;
  }

  std::vector<VertexBundle> verts;
  for (int i = 0; i < N; ++i) {
    const json& v = j["vertices"][i];
    const std::string at = "vertices[" + std::to_string(i) + "]";
    VertexBundle b;
    b.E = matrix_from_json(v.value("E", json::array()), at + ".E", d.n_x, d.n_x);
    b.A = matrix_from_json(v.value("A", json::array()), at + ".A", d.n_x, d.n_x);
    b.B = matrix_from_json(v.value("B", json::array()), at + ".B", d.n_x, d.n_u);
    b.F = matrix_from_json(v.value("F", json::array()), at + ".F", d.n_x, d.n_v);
    b.G = matrix_from_json(v.value("G", json::array()), at + ".G", d.n_x, d.n_phi);
    verts.push_back(std::move(b));
  }
  try {
    out.system.emplace(d, std::move(verts), H, C, D, Lambda, phi_id);
  } catch (const Error& ex) {
    throw IoError(std::string("model: ") + ex.what());
  }
  return out;
}

LoadedModel load_model(const std::string& path) { return model_from_json(load_json_file(path)); }

json model_to_json(const PolytopicDescriptorSystem& sys, const CoordinateMap& map) {
  const auto& d = sys.dims();
  json j;
  j["dims"] = {{"n_x", d.n_x}, {"n_u", d.n_u}, {"n_y", d.n_y},
               {"n_v", d.n_v}, {"n_w", d.n_w}, {"n_phi", d.n_phi}};
  json verts = json::array();
  for (int i = 0; i < sys.num_vertices(); ++i) {
    const auto& v = sys.vertex(i);
    verts.push_back({{"E", matrix_to_json(v.E)},
                     {"A", matrix_to_json(v.A)},
                     {"B", matrix_to_json(v.B)},
                     {"F", matrix_to_json(v.F)},
                     {"G", matrix_to_json(v.G)}});
  }
  j["vertices"] = std::move(verts);
  j["H"] = matrix_to_json(sys.H());
  j["C"] = matrix_to_json(sys.C());
  j["D"] = matrix_to_json(sys.D());
  j["Lambda"] = matrix_to_json(sys.Lambda());
  j["nonlinearity"] = sys.nonlinearity_id();
  if (map.has_box()) {
    j["parameter_box"] = {{"lower", vector_to_json(map.box_lower())},
                          {"upper", vector_to_json(map.box_upper())}};
  } else if (map.num_vertices() == 1) {
    j["parameter_box"] = {{"lower", vector_to_json(map.vertex_point(0))},
                          {"upper", vector_to_json(map.vertex_point(0))}};
  } else {
    throw IoError("model export requires a box-based or single-point map");
  }
  return j;
}

void save_model(const std::string& path, const PolytopicDescriptorSystem& sys,
                const CoordinateMap& map) {
  save_json_file(path, model_to_json(sys, map));
}

}  // namespace polyobs
