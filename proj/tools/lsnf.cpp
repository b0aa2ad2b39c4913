// lsnf: local Smith normal forms of sparse matrices from the command line.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lsnf/lsnf.h"

using nlohmann::ordered_json;

namespace {

struct Failure {
  lsnf_status status;
  std::string message;
};

void check(lsnf_status s) {
  if (s != LSNF_OK) throw Failure{s, lsnf_last_error()};
}

int exit_code(lsnf_status s) {
  return (s == LSNF_E_RETRIES_EXHAUSTED || s == LSNF_E_INSUFFICIENT_BOUND) ? 2 : 1;
}

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
  T** out() { return &p; }
  T* get() const { return p; }
};
using Ring = Handle<lsnf_ring, lsnf_ring_free>;
using Matrix = Handle<lsnf_matrix, lsnf_matrix_free>;
using Result = Handle<lsnf_result, lsnf_result_free>;

std::string take(char* s) {
  std::string out(s);
  lsnf_string_free(s);
  return out;
}

struct Config {
  std::string ring;
  std::string input;
  double xi = 100.0;
  std::size_t ell = 0;
  std::size_t slack = 8;
  unsigned c = 21;
  std::string mode = "heuristic";
  unsigned galois_degree = 0;
  std::uint64_t seed = 1;
  bool json = false;
  std::string p_path, q_path;
};

lsnf_options options_of(const Config& cfg) {
  lsnf_options o;
  lsnf_options_default(&o);
  o.xi = cfg.xi;
  o.ell = cfg.ell;
  o.slack = cfg.slack;
  o.c = cfg.c;
  o.mode = cfg.mode == "provable" ? LSNF_MODE_PROVABLE : LSNF_MODE_HEURISTIC;
  o.galois_degree = cfg.galois_degree;
  o.seed = cfg.seed;
  return o;
}

ordered_json params_of(const std::string& command, const Config& cfg) {
  ordered_json p;
  p["command"] = command;
  p["input"] = cfg.input;
  p["ring"] = cfg.ring;
  p["xi"] = cfg.xi;
  p["ell"] = cfg.ell ? ordered_json(cfg.ell) : ordered_json(nullptr);
  p["slack"] = cfg.slack;
  p["c"] = cfg.c;
  p["mode"] = cfg.mode;
  p["galois_degree"] = cfg.galois_degree;
  p["seed"] = cfg.seed;
  return p;
}

void report(const std::string& command, const Config& cfg, const lsnf_ring* ring, const lsnf_matrix* m,
            const lsnf_result* r, bool with_multiplicities) {
  const std::string desc = [&] {
    char* s = nullptr;
    check(lsnf_ring_describe(ring, &s));
    return take(s);
  }();
  const std::string pi = desc.rfind("PQ:", 0) == 0 ? "f" : "p";
  ordered_json j;
  j["ring"] = desc;
  j["dims"] = {lsnf_matrix_rows(m), lsnf_matrix_cols(m)};
  if (with_multiplicities) {
    ordered_json mult = ordered_json::object();
    for (unsigned i = 0; i < lsnf_result_exponent(r); ++i)
      mult[i == 0 ? std::string("1") : pi + "^" + std::to_string(i)] = lsnf_result_count(r, i);
    mult["0"] = lsnf_result_zeros(r);
    j["multiplicities"] = mult;
  } else {
    j["multiplicities"] = nullptr;
    j["rank"] = lsnf_result_rank(r);
  }
  const int v = lsnf_result_verified(r);
  j["verified"] = v < 0 ? ordered_json(nullptr) : ordered_json(v == 1);
  j["failure_bound"] = lsnf_result_has_failure_bound(r) ? ordered_json(lsnf_result_failure_bound(r))
                                                         : ordered_json(nullptr);
  j["seed"] = cfg.seed;
  j["matvecs"] = lsnf_result_matvecs(r);
  if (command == "smith-pe") {
    j["ell"] = lsnf_result_ell(r);
    j["r0"] = lsnf_result_r0(r);
    j["k"] = lsnf_result_k(r);
    j["eta"] = lsnf_result_eta(r);
  }
  j["params"] = params_of(command, cfg);
  if (cfg.json) {
    std::cout << j.dump() << "\n";
    return;
  }
  std::cout << "ring: " << desc << "\n";
  std::cout << "dims: " << lsnf_matrix_rows(m) << " x " << lsnf_matrix_cols(m) << "\n";
  if (with_multiplicities) {
    for (const auto& [key, count] : j["multiplicities"].items()) std::cout << key << ": " << count << "\n";
  } else {
    std::cout << "rank: " << lsnf_result_rank(r) << "\n";
  }
  if (v >= 0) std::cout << "verified: " << (v ? "yes" : "no") << "\n";
  if (lsnf_result_has_failure_bound(r)) std::cout << "failure bound: " << lsnf_result_failure_bound(r) << "\n";
  if (command == "smith-pe")
    std::cout << "ell: " << lsnf_result_ell(r) << " (r0 " << lsnf_result_r0(r) << ", k " << lsnf_result_k(r)
              << ", eta " << lsnf_result_eta(r) << ")\n";
  std::cout << "matvecs: " << lsnf_result_matvecs(r) << "\n";
  std::cout << "seed: " << cfg.seed << "\n";
}

void load(const Config& cfg, Ring& ring, Matrix& m) {
  check(lsnf_ring_parse(cfg.ring.c_str(), ring.out()));
  check(lsnf_matrix_read_sms(ring.get(), cfg.input.c_str(), m.out()));
}

std::vector<unsigned> parse_vals(const std::string& text) {
  std::vector<unsigned> out;
  std::size_t start = 0;
  while (start < text.size()) {
    const auto comma = text.find(',', start);
    const std::string tok = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    // "<count>x<valuation>" repeats a valuation.
    const auto x = tok.find('x');
    try {
      if (x == std::string::npos) {
        out.push_back(static_cast<unsigned>(std::stoul(tok)));
      } else {
        const unsigned long n = std::stoul(tok.substr(0, x));
        out.insert(out.end(), n, static_cast<unsigned>(std::stoul(tok.substr(x + 1))));
      }
    } catch (const std::exception&) {
      throw Failure{LSNF_E_PARSE, "invalid valuation list entry '" + tok + "'"};
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local Smith normal forms of sparse matrices over Z/p^e, Galois rings and F[z]/(f^e)"};
  app.require_subcommand(1);
  Config cfg;

  auto common = [&](CLI::App* sub, bool algorithm) {
    sub->add_option("--ring", cfg.ring, "Ring descriptor: Zp:<p>, Zpe:<p>^<e>, GR:<p>^<e>:<eta>, PQ:<p>[:<m>]:<f>^<e>")
        ->required();
    sub->add_option("input", cfg.input, "Matrix in SMS format")->required();
    sub->add_option("--seed", cfg.seed, "Random seed");
    sub->add_flag("--json", cfg.json, "Machine-readable output");
    if (algorithm) {
      sub->add_option("--xi", cfg.xi, "Failure parameter xi (> 1)")->capture_default_str();
      sub->add_option("--ell", cfg.ell, "Reduced dimension l (default: rank mod p + slack)");
      sub->add_option("--slack", cfg.slack, "Slack added to the rank estimate")->capture_default_str();
      sub->add_option("--c", cfg.c, "Verification projections (0 skips verification)")->capture_default_str();
      sub->add_option("--mode", cfg.mode, "Preconditioners")
          ->check(CLI::IsMember({"heuristic", "provable"}))
          ->capture_default_str();
      sub->add_option("--galois-degree", cfg.galois_degree,
                      "Residue degree of the heuristic working ring over Z/p^e (0: automatic)");
    }
  };

  auto* fe = app.add_subcommand("smith-fe", "Smith form over F[z]/(f^e) from rank profiles");
  common(fe, true);
  auto* pe = app.add_subcommand("smith-pe", "Smith form over Z/p^e by dimension reduction and nullspace lifting");
  common(pe, true);
  auto* rank = app.add_subcommand("rank", "Black-box rank over Z/p");
  common(rank, true);
  auto* dense = app.add_subcommand("dense-smith", "Dense elimination oracle");
  common(dense, false);
  auto* verify = app.add_subcommand("verify", "Projection verification of P A Q");
  common(verify, true);
  verify->add_option("--P", cfg.p_path, "Left projection (l x m), SMS");
  verify->add_option("--Q", cfg.q_path, "Right projection (n x l), SMS");

  auto* carries = app.add_subcommand("carries", "Carry-rank experiment; JSON lines, one per trial");
  std::uint64_t cp = 2;
  std::size_t cn = 60, cr = 4;
  int cdigits = -1;
  unsigned ctrials = 50;
  carries->add_option("--p", cp, "Prime")->capture_default_str();
  carries->add_option("--n", cn, "Dimension")->capture_default_str();
  carries->add_option("--r", cr, "Rank of S")->capture_default_str();
  carries->add_option("--digits", cdigits, "Highest digit index (default: from the entry bound)");
  carries->add_option("--trials", ctrials, "Trials")->capture_default_str();
  carries->add_option("--seed", cfg.seed, "Random seed");

  auto* gen = app.add_subcommand("gen", "Emit a planted matrix U S V in SMS format");
  std::size_t rows = 0, cols = 0;
  std::string vals, out_path;
  bool sparse = false;
  gen->add_option("--ring", cfg.ring, "Ring descriptor")->required();
  gen->add_option("--rows", rows, "Rows")->required();
  gen->add_option("--cols", cols, "Columns")->required();
  gen->add_option("--vals", vals, "Valuations of S, e.g. 45x0,3x1,3,4 (values >= e are zeros)");
  gen->add_flag("--sparse", sparse, "Sparse triangular factors instead of dense unimodular ones");
  gen->add_option("--seed", cfg.seed, "Random seed");
  gen->add_option("-o,--output", out_path, "Output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const lsnf_options opts = options_of(cfg);
    if (*carries) {
      char* text = nullptr;
      std::size_t violations = 0;
      check(lsnf_carries(cp, cn, cr, cdigits, ctrials, cfg.seed, &text, &violations));
      std::cout << take(text);
      if (violations) std::cerr << "bound violated " << violations << " times: counterexample found, investigate\n";
      return 0;
    }
    if (*gen) {
      Ring ring;
      Matrix m;
      check(lsnf_ring_parse(cfg.ring.c_str(), ring.out()));
      const auto v = parse_vals(vals);
      check(lsnf_matrix_planted(ring.get(), rows, cols, v.data(), v.size(), sparse, cfg.seed, m.out()));
      char* text = nullptr;
      check(lsnf_matrix_to_sms(m.get(), &text));
      const std::string sms = take(text);
      if (out_path.empty()) {
        std::cout << sms;
      } else {
        std::ofstream out(out_path);
        if (!(out << sms)) throw Failure{LSNF_E_IO, "cannot write '" + out_path + "'"};
      }
      return 0;
    }

    Ring ring;
    Matrix m;
    load(cfg, ring, m);
    Result r;
    std::string command;
    bool mult = true;
    if (*fe) {
      command = "smith-fe";
      check(lsnf_smith_fe(m.get(), &opts, r.out()));
    } else if (*pe) {
      command = "smith-pe";
      check(lsnf_smith_pe(m.get(), &opts, r.out()));
    } else if (*rank) {
      command = "rank";
      mult = false;
      check(lsnf_rank(m.get(), &opts, r.out()));
    } else if (*dense) {
      command = "dense-smith";
      check(lsnf_dense_smith(m.get(), r.out()));
    } else {
      command = "verify";
      Matrix p, q;
      if (!cfg.p_path.empty()) check(lsnf_matrix_read_sms(ring.get(), cfg.p_path.c_str(), p.out()));
      if (!cfg.q_path.empty()) check(lsnf_matrix_read_sms(ring.get(), cfg.q_path.c_str(), q.out()));
      check(lsnf_verify(m.get(), p.get(), q.get(), &opts, r.out()));
    }
    report(command, cfg, ring.get(), m.get(), r.get(), mult);
    return 0;
  } catch (const Failure& f) {
    std::cerr << "error: " << lsnf_status_name(f.status) << ": " << f.message << "\n";
    return exit_code(f.status);
  }
}
