#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "sepform/analysis.hpp"
#include "sepform/constructors.hpp"
#include "sepform/solver.hpp"

namespace sepform::io {

using nlohmann::json;

/// Complex vectors are stored as parallel "<key>_re" / "<key>_im" arrays;
/// a missing "_im" array means a real vector.
CVector read_complex(const json& j, const std::string& key);
void write_complex(json& j, const std::string& key, std::span<const Complex> v);

/// {"m", "n", "re", "im"}, row-major (i,j,k,l); reading validates hermiticity.
json form_to_json(const HermitianForm& rho);
HermitianForm form_from_json(const json& j);

/// {"alpha", "terms": [{"phi_re", "phi_im", "psi_re", "psi_im"}]}
json ensemble_to_json(const WavepacketEnsemble& e);
WavepacketEnsemble ensemble_from_json(const json& j);

/// {"terms": [{"phi_re", "phi_im", "a", "b", "c"}]}
json torus_to_json(const TorusEnsemble& e);
TorusEnsemble torus_from_json(const json& j);

/// {"weight", "phi_re", "phi_im", "psi_re", "psi_im"}; weight defaults to 1.
json term_to_json(const ProductTerm& t);
ProductTerm term_from_json(const json& j);

/// {"m", "n", "forms": [{"terms": [...]}]}; forms are rebuilt from their terms.
json basis_to_json(const SeparableBasis& b);
SeparableBasis basis_from_json(const json& j);

/// Either a bare array or {"lambda": [...]}.
RVector lambda_from_json(const json& j);

json report_to_json(const AnalysisReport& r);
json irc_to_json(const IrcReport& r);

/// CSV with header "alpha,frobenius_error".
std::string convergence_csv(const ConvergenceStudy& s);

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace sepform::io
