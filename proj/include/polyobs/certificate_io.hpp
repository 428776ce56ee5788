#pragma once

#include <string>

#include "polyobs/json_util.hpp"
#include "polyobs/lmi_synthesis.hpp"

namespace polyobs {

json certificate_to_json(const SynthesisCertificate& cert);
SynthesisCertificate certificate_from_json(const json& j);

void save_certificate(const std::string& path, const SynthesisCertificate& cert);
SynthesisCertificate load_certificate(const std::string& path);

}  // namespace polyobs
