#include "polyobs/certificate_io.hpp"

#include "polyobs/errors.hpp"

namespace polyobs {

json certificate_to_json(const SynthesisCertificate& cert) {
  json j;
  j["format"] = "polyobs-certificate";
  j["variant"] = to_string(cert.variant);
  j["epsilon"] = cert.epsilon;
  j["sigma_lower"] = cert.sigma_lower;
  j["constant_parameter"] = cert.constant_parameter;
  j["diagonal_multiplier"] = cert.diagonal_multiplier;
  j["kappa_v"] = cert.kappa_v;
  j["kappa_w"] = cert.kappa_w;
  j["kappa_psi"] = cert.kappa_psi;
  auto matrices = [](const std::vector<Matrix>& ms) {
    json arr = json::array();
    for (const auto& m : ms) arr.push_back(matrix_to_json(m));
    return arr;
  };
  j["P"] = matrices(cert.P);
  j["X"] = matrices(cert.X);
  j["Y"] = matrices(cert.Y);
  j["Z"] = matrices(cert.Z);
  json taus = json::array();
  for (const auto& t : cert.tau) taus.push_back(vector_to_json(t));
  j["tau"] = taus;
  j["solver"] = {{"iterations", cert.iterations}, {"objective", cert.objective_value}};
  return j;
}

SynthesisCertificate certificate_from_json(const json& j) {
  if (!j.is_object() || j.value("format", "") != "polyobs-certificate")
    throw IoError("certificate: not a polyobs certificate document");
  SynthesisCertificate cert;
  const std::string variant = j.value("variant", "");
  if (variant == "thm1")
    cert.variant = Variant::Thm1;
  else if (variant == "thm2")
    cert.variant = Variant::Thm2;
  else
    throw IoError("certificate: unknown variant '" + variant + "'");
  cert.epsilon = j.value("epsilon", 0.0);
  cert.sigma_lower = j.value("sigma_lower", 0.0);
  cert.constant_parameter = j.value("constant_parameter", false);
  cert.diagonal_multiplier = j.value("diagonal_multiplier", false);
  cert.kappa_v = j.value("kappa_v", 0.0);
  cert.kappa_w = j.value("kappa_w", 0.0);
  cert.kappa_psi = j.value("kappa_psi", 0.0);
  auto matrices = [&](const char* key, std::vector<Matrix>& out) {
    if (!j.contains(key) || !j[key].is_array()) throw IoError(std::string("certificate: missing ") + key);
    for (std::size_t i = 0; i < j[key].size(); ++i)
      out.push_back(matrix_from_json(j[key][i], std::string(key) + "[" + std::to_string(i) + "]"));
  };
  matrices("P", cert.P);
  matrices("X", cert.X);
  matrices("Y", cert.Y);
  matrices("Z", cert.Z);
  if (!j.contains("tau") || !j["tau"].is_array()) throw IoError("certificate: missing tau");
  for (std::size_t i = 0; i < j["tau"].size(); ++i)
    cert.tau.push_back(vector_from_json(j["tau"][i], "tau[" + std::to_string(i) + "]"));
  if (j.contains("solver")) {
    cert.iterations = j["solver"].value("iterations", 0);
    cert.objective_value = j["solver"].value("objective", 0.0);
  }

  const int N = cert.N();
  const std::size_t nsq = static_cast<std::size_t>(N) * N;
  if (N == 0) throw IoError("certificate: empty P");
  if (cert.X.size() != (cert.variant == Variant::Thm1 ? static_cast<std::size_t>(N) : nsq))
    throw IoError("certificate: X count does not match variant");
  if (cert.Y.size() != nsq || cert.Z.size() != nsq || cert.tau.size() != nsq)
    throw IoError("certificate: Y/Z/tau must have N^2 entries");
  return cert;
}

void save_certificate(const std::string& path, const SynthesisCertificate& cert) {
  save_json_file(path, certificate_to_json(cert));
}

SynthesisCertificate load_certificate(const std::string& path) {
  return certificate_from_json(load_json_file(path));
}

}  // namespace polyobs
