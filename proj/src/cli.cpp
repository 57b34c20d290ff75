#include "sepform/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "sepform/io.hpp"
#include "sepform/kernels.hpp"
#include "sepform/quadrature.hpp"

namespace sepform::cli {

namespace {

using io::json;

struct Globals {
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  std::string kernels = "auto";
};

HermitianForm build_form(const std::string& kind, const json& spec) {
  if (kind == "product") return product_form(io::read_complex(spec, "phi"), io::read_complex(spec, "psi"));
  if (kind == "mixture") {
    std::vector<ProductTerm> terms;
    if (!spec.is_object() || !spec.contains("terms") || !spec.at("terms").is_array())
      throw InputError("mixture: expected {\"terms\": [...]}");
    for (const auto& t : spec.at("terms")) terms.push_back(io::term_from_json(t));
    return separable_mixture(terms);
  }
  if (kind == "wavepacket") return wavepacket_form(io::ensemble_from_json(spec));
  if (kind == "torus") return torus_form(io::torus_from_json(spec));
  if (kind == "gradient-gaussian") {
    if (!spec.contains("alpha") || !spec.at("alpha").is_number()) throw InputError("gradient-gaussian: missing alpha");
    return gradient_gaussian_form(io::read_complex(spec, "psi"), spec.at("alpha").get<double>());
  }
  throw InputError("unknown form kind: " + kind);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw InputError("not a number: \"" + item + "\"");
    }
    if (used != item.size()) throw InputError("not a number: \"" + item + "\"");
    out.push_back(v);
  }
  return out;
}

void emit(const json& j, const std::string& path, std::ostream& out) {
  if (path.empty())
    out << j.dump(2) << '\n';
  else
    io::write_json_file(path, j);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Separable Hermitian forms: constructors, quadrature oracle, diagnostics and solver", "sepform"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Seed for every randomized step")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads for quadrature (0 = hardware)")->capture_default_str();
  app.add_option("--kernels", g.kernels, "Kernel selection")
      ->check(CLI::IsMember({"auto", "scalar"}))
      ->capture_default_str();

  std::string kind, in, out_path;
  auto* build = app.add_subcommand("build", "Construct a form and write it as JSON");
  build->add_option("--kind", kind, "Constructor")
      ->required()
      ->check(CLI::IsMember({"product", "mixture", "wavepacket", "torus", "gradient-gaussian"}));
  build->add_option("--in", in, "Constructor input")->required();
  build->add_option("--out", out_path, "Output form (stdout when omitted)");

  std::size_t restarts = 32, iters = 200;
  double analyze_tol = 1e-8;
  auto* analyze_cmd = app.add_subcommand("analyze", "PSD, rank, PPT, kernels, IRC and classification");
  analyze_cmd->add_option("--in", in, "Form file")->required();
  analyze_cmd->add_option("--restarts", restarts, "Product-minimization restarts")->capture_default_str();
  analyze_cmd->add_option("--iters", iters, "Alternating steps per restart")->capture_default_str();
  analyze_cmd->add_option("--tol", analyze_tol, "IRC threshold relative to the spectral norm")->capture_default_str();
  analyze_cmd->add_option("--out", out_path, "Report file (stdout when omitted)");

  std::size_t grid = 0;
  double radius = 0.0, verify_tol = 1e-3;
  auto* verify = app.add_subcommand("verify", "Closed form against the quadrature oracle");
  verify->add_option("--in", in, "Wavepacket or torus ensemble")->required();
  verify->add_option("--grid", grid, "Points per real axis (default by domain)");
  verify->add_option("--radius", radius, "Box half width (default 4 sqrt(alpha))");
  verify->add_option("--tol", verify_tol, "Relative Frobenius tolerance")->capture_default_str();

  std::string target, basis_path, lambda_path, report_path;
  double beta = 0.0;
  std::size_t max_iter = 50;
  double solve_tol = 1e-10;
  auto* represent = app.add_subcommand("represent", "Solve for a wavepacket ensemble realizing a target form");
  represent->add_option("--target", target, "Target form")->required();
  represent->add_option("--basis", basis_path, "Separable basis")->required();
  represent->add_option("--lambda0", lambda_path, "Starting coefficients")->required();
  represent->add_option("--beta", beta, "Target beta (alpha = 1/beta^2)")->required();
  represent->add_option("--out", out_path, "Output ensemble")->required();
  represent->add_option("--report", report_path, "Solver report (stdout when omitted)");
  represent->add_option("--max-iter", max_iter, "Newton step cap")->capture_default_str();
  represent->add_option("--tol", solve_tol, "Residual tolerance")->capture_default_str();

  std::string alphas = "1,2,4,8,16,32,64,128,256,512,1024";
  auto* converge = app.add_subcommand("converge", "Distance to the alpha -> infinity limit");
  converge->add_option("--in", in, "Wavepacket ensemble")->required();
  converge->add_option("--alphas", alphas, "Comma-separated increasing alphas")->capture_default_str();
  converge->add_option("--out", out_path, "CSV table (stdout when omitted)");

  std::size_t span_m = 0, span_n = 0;
  auto* span = app.add_subcommand("span-test", "Real span of the product-form family");
  span->add_option("--m", span_m, "Dimension of the first factor")->required();
  span->add_option("--n", span_n, "Dimension of the second factor")->required();

  std::string psi_path;
  std::int64_t max_int = 0;
  double comm_tol = 1e-9;
  auto* comm = app.add_subcommand("commensurable", "Search psi = w (a + i b) over bounded Gaussian integers");
  comm->add_option("--psi", psi_path, "File with psi_re / psi_im")->required();
  comm->add_option("--max-int", max_int, "Bound on |a_j|, |b_j|")->required();
  comm->add_option("--tol", comm_tol, "Relative tolerance")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInput;
  }

  kernels::force_scalar(g.kernels == "scalar");
  try {
    if (*build) {
      emit(io::form_to_json(build_form(kind, io::read_json_file(in))), out_path, out);
    } else if (*analyze_cmd) {
      const HermitianForm rho = io::form_from_json(io::read_json_file(in));
      AnalysisOptions opt;
      opt.irc.restarts = restarts;
      opt.irc.iters = iters;
      opt.irc.tol = analyze_tol;
      opt.irc.seed = g.seed;
      const AnalysisReport r = analyze(rho, opt);
      emit(io::report_to_json(r), out_path, out);
      if (!out_path.empty()) out << r.classification << '\n';
    } else if (*verify) {
      const json spec = io::read_json_file(in);
      HermitianForm closed, oracle;
      QuadratureOptions qo;
      qo.threads = g.threads;
      if (spec.contains("alpha")) {
        const WavepacketEnsemble e = io::ensemble_from_json(spec);
        const BoxDomain box{e.n(), radius > 0.0 ? radius : min_box_half_width(e.alpha),
                            grid ? grid : default_box_points(e.n())};
        closed = wavepacket_form(e);
        oracle = oracle_form(sample_wavepacket(e, box), qo);
      } else {
        const TorusEnsemble e = io::torus_from_json(spec);
        const auto need = static_cast<std::size_t>(2 * e.max_frequency() + 3);
        closed = torus_form(e);
        oracle = oracle_form(sample_torus(e, TorusDomain{e.n(), grid ? grid : std::max(kMinGridPoints, need)}), qo);
      }
      const double error = (oracle - closed).frobenius_norm();
      const double rel = error / std::max(closed.frobenius_norm(), 1e-300);
      const bool ok = rel <= verify_tol;
      out << std::setprecision(6) << "frobenius_error " << error << " relative " << rel << ' '
          << (ok ? "OK" : "FAIL") << '\n';
      if (!ok) throw ToleranceError("oracle and closed form differ beyond tolerance");
    } else if (*represent) {
      const HermitianForm t = io::form_from_json(io::read_json_file(target));
      const SeparableBasis b = io::basis_from_json(io::read_json_file(basis_path));
      const RVector l0 = io::lambda_from_json(io::read_json_file(lambda_path));
      SolverOptions so;
      so.max_iter = max_iter;
      so.tol = solve_tol;
      const SolverResult r = solve_interior(t, b, l0, beta, so);
      io::write_json_file(out_path, io::ensemble_to_json(r.ensemble));
      json rep;
      rep["lambda0"] = l0;
      rep["lambda_star"] = r.state.lambda;
      rep["beta_target"] = beta;
      rep["residual"] = r.state.residual_norm;
      rep["iterations"] = r.state.iterations;
      rep["ensemble_file"] = out_path;
      emit(rep, report_path, out);
    } else if (*converge) {
      const WavepacketEnsemble e = io::ensemble_from_json(io::read_json_file(in));
      const auto list = parse_list(alphas);
      const ConvergenceStudy s = convergence_study(e, list);
      const std::string csv = io::convergence_csv(s);
      if (out_path.empty()) {
        out << csv;
      } else {
        io::write_text_file(out_path, csv);
        out << std::setprecision(6) << "slope " << s.slope << " c1 " << s.c1 << " c2 " << s.c2 << " d "
            << s.min_psi_distance << '\n';
      }
    } else if (*span) {
      const SpanResult s = spanning_test(span_m, span_n);
      out << s.dimension << " / " << s.expected << (s.ok ? " OK" : " FAIL") << '\n';
      if (!s.ok) return kTolerance;
    } else if (*comm) {
      const CVector psi = io::read_complex(io::read_json_file(psi_path), "psi");
      const auto c = commensurable_check(psi, max_int, comm_tol);
      json j;
      j["found"] = c.has_value();
      if (c) {
        j["w_re"] = c->w.real();
        j["w_im"] = c->w.imag();
        j["a"] = c->a;
        j["b"] = c->b;
      }
      out << j.dump(2) << '\n';
    }
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kConvergence;
  } catch (const ToleranceError& e) {
    err << "error: " << e.what() << '\n';
    return kTolerance;
  } catch (const json::exception& e) {
    err << "error: malformed JSON: " << e.what() << '\n';
    return kInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInput;
  }
  return kOk;
}

}  // namespace sepform::cli
