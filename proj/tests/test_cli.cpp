#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sepform/cli.hpp"
#include "sepform/io.hpp"
#include "support.hpp"

using namespace sepform;
using io::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "sepform");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class Scratch {
 public:
  Scratch() : dir_(std::filesystem::temp_directory_path() / ("sepform_cli_" + std::to_string(::getpid()))) {
    std::filesystem::create_directories(dir_);
  }
  ~Scratch() { std::filesystem::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string write(const std::string& name, const json& j) const {
    io::write_json_file(path(name), j);
    return path(name);
  }

 private:
  std::filesystem::path dir_;
};

void check_report_schema(const json& j) {
  for (const char* key : {"psd", "ppt", "rank", "ker_K_dim", "ker_L_dim", "classification", "irc"})
    CHECK(j.contains(key));
  CHECK(j["psd"].is_boolean());
  CHECK(j["rank"].is_number_integer());
  CHECK(j["classification"].is_string());
  if (!j["irc"].is_null()) {
    CHECK(j["irc"]["satisfied"].is_boolean());
    CHECK(j["irc"]["min_value"].is_number());
    CHECK(j["irc"]["witness"].contains("v_re"));
  }
}

}  // namespace

TEST_CASE("span-test") {
  const Result r = invoke({"span-test", "--m", "2", "--n", "2"});
  CHECK(r.code == 0);
  CHECK(r.out == "16 / 16 OK\n");
}

TEST_CASE("verify") {
  Scratch s;
  const auto in = s.write("single.json", json{{"alpha", 1.0}, {"terms", {{{"phi_re", {1.0}}, {"psi_re", {0.0}}}}}});
  const Result r = invoke({"verify", "--in", in, "--grid", "201", "--radius", "6"});
  CHECK(r.code == 0);
  CHECK(r.out.find("OK") != std::string::npos);

  const auto torus = s.write("torus.json", json{{"terms", {{{"phi_re", {1.0}}, {"a", {1}}, {"b", {0}}, {"c", 1}}}}});
  CHECK(invoke({"verify", "--in", torus}).code == 0);

  // A grid far too coarse for the modulation fails the tolerance.
  const auto fast = s.write("fast.json", json{{"alpha", 1.0}, {"terms", {{{"phi_re", {1.0}}, {"psi_re", {3.0}}}}}});
  CHECK(invoke({"verify", "--in", fast, "--grid", "16"}).code == 2);
}

TEST_CASE("build and analyze") {
  Scratch s;
  const auto spec = s.write("bell_mix.json", json{{"terms",
                                                   {{{"weight", 0.5}, {"phi_re", {1, 0}}, {"psi_re", {1, 0}}},
                                                    {{"weight", 0.5}, {"phi_re", {0, 1}}, {"psi_re", {0, 1}}}}}});
  const auto form = s.path("form.json");
  CHECK(invoke({"build", "--kind", "mixture", "--in", spec, "--out", form}).code == 0);
  const json fj = io::read_json_file(form);
  CHECK(fj["m"] == 2);
  CHECK(fj["re"][0] == 0.5);

  const auto report = s.path("report.json");
  const Result r = invoke({"analyze", "--in", form, "--out", report});
  CHECK(r.code == 0);
  const json rj = io::read_json_file(report);
  check_report_schema(rj);
  CHECK(rj["classification"] == "boundary-or-entangled");

  const auto bell = s.write("bell.json", json{{"m", 2},
                                              {"n", 2},
                                              {"re", {0.5, 0, 0, 0.5, 0, 0, 0, 0, 0, 0, 0, 0, 0.5, 0, 0, 0.5}},
                                              {"im", std::vector<double>(16, 0.0)}});
  const Result b = invoke({"analyze", "--in", bell});
  CHECK(b.code == 0);
  const json bj = json::parse(b.out);
  check_report_schema(bj);
  CHECK(bj["classification"] == "entangled(PPT-violated)");
  CHECK(bj["pt_min_eigenvalue"].get<double>() == doctest::Approx(-0.5));
}

TEST_CASE("round trip through files is bit-identical") {
  Scratch s;
  const auto spec = s.write("wp.json", json{{"alpha", 0.7},
                                            {"terms",
                                             {{{"phi_re", {0.1, 0.2}}, {"phi_im", {0.3, -0.7}}, {"psi_re", {1.0 / 3, 0.0}}},
                                              {{"phi_re", {0.9, 0.0}}, {"psi_re", {0.0, 0.25}}, {"psi_im", {0.1, 0.2}}}}}});
  const auto form = s.path("wp_form.json");
  CHECK(invoke({"build", "--kind", "wavepacket", "--in", spec, "--out", form}).code == 0);
  const HermitianForm direct = wavepacket_form(io::ensemble_from_json(io::read_json_file(spec)));
  const HermitianForm back = io::form_from_json(io::read_json_file(form));
  CHECK(test::bitwise_equal(back.matrix().data(), direct.matrix().data()));
}

TEST_CASE("represent and converge") {
  Scratch s;
  const SeparableBasis b = random_basis(1, 1, 5);
  const auto basis = s.write("basis.json", io::basis_to_json(b));
  const auto target = s.write("target.json", io::form_to_json(b.forms[0] * 2.0));
  const auto l0 = s.write("l0.json", json{{"lambda", {1.5}}});
  const auto out = s.path("ens.json");
  const Result r = invoke({"represent", "--target", target, "--basis", basis, "--lambda0", l0, "--beta", "0.3", "--out", out});
  CHECK(r.code == 0);
  const json rep = json::parse(r.out);
  CHECK(rep["residual"].get<double>() <= 1e-10);
  CHECK(rep["ensemble_file"] == out);
  const WavepacketEnsemble e = io::ensemble_from_json(io::read_json_file(out));
  CHECK(e.alpha == doctest::Approx(1.0 / 0.09));

  const Result c = invoke({"converge", "--in", out, "--alphas", "1,2,4"});
  CHECK(c.code == 0);
  CHECK(c.out.rfind("alpha,frobenius_error\n", 0) == 0);

  CHECK(invoke({"represent", "--target", target, "--basis", basis, "--lambda0", l0, "--beta", "0.3", "--out", out,
             "--max-iter", "0"})
            .code == 3);
}

TEST_CASE("commensurable") {
  Scratch s;
  const auto psi = s.write("psi.json", json{{"psi_re", {1, 2}}, {"psi_im", {1, 2}}});
  const Result r = invoke({"commensurable", "--psi", psi, "--max-int", "5"});
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["found"] == true);
  const auto pi = s.write("pi.json", json{{"psi_re", {1.0, 3.141592653589793}}});
  CHECK(json::parse(invoke({"commensurable", "--psi", pi, "--max-int", "50"}).out)["found"] == false);
}

TEST_CASE("malformed input") {
  Scratch s;
  CHECK(invoke({}).code == 1);
  CHECK(invoke({"nonsense"}).code == 1);
  CHECK(invoke({"span-test", "--m", "x", "--n", "2"}).code == 1);
  CHECK(invoke({"analyze", "--in", s.path("missing.json")}).code == 1);
  std::ofstream(s.path("broken.json")) << "{not json";
  CHECK(invoke({"analyze", "--in", s.path("broken.json")}).code == 1);
  const auto nonherm = s.write("nh.json", json{{"m", 1}, {"n", 2}, {"re", {1, 1, 0, 1}}, {"im", {0, 0, 0, 0}}});
  const Result r = invoke({"analyze", "--in", nonherm});
  CHECK(r.code == 1);
  CHECK(!r.err.empty());
  const auto wrong = s.write("neg.json", json{{"terms", {{{"weight", -1}, {"phi_re", {1}}, {"psi_re", {1}}}}}});
  CHECK(invoke({"build", "--kind", "mixture", "--in", wrong}).code == 1);
}
