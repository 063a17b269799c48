#pragma once

#include <iosfwd>
#include <string>

#include "wadc/lmi.hpp"
#include "wadc/ssmodel.hpp"

namespace wadc {

/// Parses a model document: fields n, m, p, A, B, C, D (dense row-major
/// arrays), optional h (returned separately by load_model_with_h), optional
/// labels. Throws ParseError / DimensionMismatch / NonFiniteEntry.
CtStateSpace load_model(const std::string& document);
CtStateSpace load_model_file(const std::string& path);

/// Serializes a model to the same document format. When h > 0 it is included.
std::string save_model(const CtStateSpace& model, double h = 0.0);

/// Optional h carried by a model document (0 when absent).
double document_step(const std::string& document);

/// Certificate export/reload so a Feasible verdict can be re-verified
/// independently of the solver run.
std::string save_certificate(const LmiCertificate& cert);
LmiCertificate load_certificate(const std::string& document);

} // namespace wadc
