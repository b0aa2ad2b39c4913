// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "lsnf/carries.hpp"
#include "lsnf/planted.hpp"
#include "lsnf/smith_padic.hpp"
#include "lsnf/smith_poly.hpp"

using namespace lsnf;

namespace {

using PQ = PolyQuotRing<PrimeField>;

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Nullspace and divisibility tallies shared by every criterion.
struct Exactness {
  std::size_t vectors = 0, bad_vectors = 0;
  std::size_t divisibility = 0, internal_errors = 0;
} exactness;

template <class R>
SparseBlackBox<R> box(const DenseMatrix<R>& a) {
  return SparseBlackBox<R>(TripletMatrix<R>::from_dense(a));
}

template <class F>
void check_kernel(const DenseMatrix<F>& a, const DenseMatrix<F>& n) {
  auto an = a * n;
  for (std::size_t j = 0; j < n.cols(); ++j) {
    bool zero = true;
    for (std::size_t i = 0; i < an.rows(); ++i) zero = zero && an.ring().is_zero(an(i, j));
    ++exactness.vectors;
    exactness.bad_vectors += !zero;
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x, int digits = 2) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << x;
  return os.str();
}

Outcome embedding_ranks() {
  Rng rng(101);
  std::size_t cases = 0, wrong = 0;
  for (u64 p : {2, 3, 5})
    for (unsigned d = 1; d <= 4; ++d) {
      PrimeField f(p);
      auto poly = random_irreducible(f, d, rng);
      for (unsigned e = 1; e <= 4; ++e) {
        PQ ring(f, poly, e);
        for (unsigned i = 0; i <= e; ++i) {
          DenseMatrix<PQ> a(ring, 1, 1);
          a(0, 0) = ring.uniformizer_pow(i);
          ++cases;
          wrong += dense_rank(to_dense(embed_phi(dense_operator(a), e))) != d * (e - i);
        }
      }
    }
  return {wrong == 0, std::to_string(cases - wrong) + "/" + std::to_string(cases) + " exact"};
}

Outcome rank_system_round_trip() {
  std::size_t cases = 0, wrong = 0;
  for (unsigned d = 1; d <= 3; ++d)
    for (unsigned e = 1; e <= 4; ++e) {
      std::vector<std::size_t> r(e, 0);
      // Odometer over r with sum(r) <= 6, then every n in [sum, 6].
      for (;;) {
        std::size_t sum = 0;
        for (auto x : r) sum += x;
        if (sum <= 6)
          for (std::size_t n = sum; n <= 6; ++n) {
            SmithMultiplicities s{"", r, n - sum};
            ++cases;
            wrong += !(solve_rank_system(rank_profile_from_multiplicities(s, d, n)) == s);
          }
        std::size_t pos = 0;
        while (pos < e && ++r[pos] > 6) r[pos++] = 0;
        if (pos == e) break;
      }
    }
  return {wrong == 0, std::to_string(cases - wrong) + "/" + std::to_string(cases) + " round trips"};
}

struct FeTally {
  int total = 0, match = 0, exhausted = 0, silent = 0;
  std::size_t over_budget = 0;
  u64 worst_ratio_num = 0, worst_ratio_den = 1;
} fe;

Outcome smith_fe_vs_oracle() {
  Rng rng(303);
  const u64 primes[] = {2, 3, 5};
  for (int t = 0; t < 200; ++t) {
    const u64 p = primes[t % 3];
    const unsigned d = 1 + static_cast<unsigned>(rng.below(2));
    const unsigned e = 1 + static_cast<unsigned>(rng.below(3));
    const std::size_t rows = 1 + rng.below(12), cols = 1 + rng.below(12);
    PrimeField f(p);
    PQ ring(f, random_irreducible(f, d, rng), e);
    std::vector<unsigned> vals;
    const std::size_t nz = rng.below(std::min(rows, cols) + 1);
    for (std::size_t i = 0; i < nz; ++i) vals.push_back(static_cast<unsigned>(rng.below(e)));
    std::sort(vals.begin(), vals.end());
    auto a = planted_dense(ring, rows, cols, std::span<const unsigned>(vals), rng);
    auto src = box(a);
    ++fe.total;
    try {
      auto res = smith_fe(src, rng);
      if (res.multiplicities == dense_smith_local(a))
        ++fe.match;
      else
        ++fe.silent;
      const u64 budget = 16ull * d * e * e * std::max(rows, cols);
      fe.over_budget += res.matvecs > budget;
      if (res.matvecs * fe.worst_ratio_den > fe.worst_ratio_num * budget) {
        fe.worst_ratio_num = res.matvecs;
        fe.worst_ratio_den = budget;
      }
    } catch (const Error& err) {
      if (err.code() != ErrorCode::RetriesExhausted) throw;
      ++fe.exhausted;
      std::cerr << "  smith_fe instance " << t << ": " << err.what() << "\n";
    }
  }
  return {fe.match >= 199 && fe.silent == 0,
          std::to_string(fe.match) + "/200 match, " + std::to_string(fe.exhausted) + " retry exhaustions, " +
              std::to_string(fe.silent) + " silent mismatches"};
}

Outcome matvec_budget() {
  if (fe.total == 0) return {false, "criterion 3 did not run"};
  return {fe.over_budget == 0, std::to_string(fe.over_budget) + " calls over 16 d e^2 n, worst " +
                                   std::to_string(fe.worst_ratio_num) + "/" + std::to_string(fe.worst_ratio_den)};
}

Outcome sketch_reproduction() {
  Rng rng(505);
  LocalIntRing r(3, 5);
  GaloisRing gr(3, 5, first_irreducible(PrimeField(3), heuristic_galois_degree(3)));
  auto emb = [&gr](u64 x) { return gr.embed(x); };
  std::vector<unsigned> v(45, 0);
  v.insert(v.end(), {1, 1, 1, 3, 4});
  const std::vector<std::size_t> expect{45, 3, 0, 1, 1};
  int good = 0;
  for (int t = 0; t < 100; ++t) {
    auto a = planted_sparse(r, 100, 100, std::span<const unsigned>(v), rng);
    SparseBlackBox<LocalIntRing> src(a);
    try {
      auto pair = make_preconditioners(gr, 100, 100, 52, PreconditionerMode::Heuristic, 100.0, rng);
      auto res = smith_pe_nullspace(src, gr, emb, pair, rng);
      exactness.divisibility += res.divisibility_checked;
      auto rep = projection_verify(src.over(gr, emb), pair.b1(), pair.b2(), 21, rng);
      good += rep.verified && res.multiplicities.counts == expect && res.multiplicities.zeros == 50;
    } catch (const Error& err) {
      exactness.internal_errors += err.code() == ErrorCode::Internal;
      std::cerr << "  sketch run " << t << ": " << err.what() << "\n";
    }
  }
  return {good >= 95, std::to_string(good) + "/100 correct and verified"};
}

Outcome preconditioner_bound() {
  Rng rng(606);
  LocalIntRing r(433, 2);
  const std::size_t n = 6;
  int preserved = 0;
  for (int t = 0; t < 200; ++t) {
    std::vector<unsigned> vals;
    const std::size_t nz = 1 + rng.below(n);
    for (std::size_t i = 0; i < nz; ++i) vals.push_back(static_cast<unsigned>(rng.below(2)));
    std::sort(vals.begin(), vals.end());
    auto a = planted_dense(r, n, n, std::span<const unsigned>(vals), rng);
    auto pair = make_preconditioners(r, n, n, n, PreconditionerMode::Provable, 2.0, rng);
    auto reduced = to_dense(reduce_dimension(dense_operator(a), pair));
    // Every leading i x i minor carries the first i invariants of A.
    bool ok = true;
    for (std::size_t i = 1; i <= nz && ok; ++i) {
      auto s = local_invariant_valuations(reduced.submatrix(0, 0, i, i));
      ok = std::equal(s.begin(), s.end(), vals.begin());
    }
    preserved += ok;
  }
  const double freq = preserved / 200.0;
  return {freq >= 0.5, "preserved in " + std::to_string(preserved) + "/200 (" + fmt(freq, 3) + ")"};
}

Outcome verification_soundness() {
  Rng rng(707);
  LocalIntRing r(3, 2);
  std::vector<unsigned> v{0, 0, 0, 1};
  auto d = smith_diagonal(r, 6, 6, std::span<const unsigned>(v));
  // Columns 0..2 and 4 drop the invariant 3; columns 0..3 keep it.
  auto select = [&](std::initializer_list<std::size_t> cols) {
    DenseMatrix<LocalIntRing> s(r, 6, cols.size());
    std::size_t j = 0;
    for (auto c : cols) s(c, j++) = r.one();
    return s;
  };
  const auto drop = select({0, 1, 2, 4}), keep = select({0, 1, 2, 3});
  int false_accept = 0, complete = 0;
  for (int t = 0; t < 400; ++t) {
    auto u = random_unimodular(r, 6, rng), w = random_unimodular(r, 6, rng);
    auto a = dense_operator(u * d * w);
    auto p = dense_operator(dense_inverse(u).submatrix(0, 0, 4, 6));
    auto winv = dense_inverse(w);
    false_accept += projection_verify(a, p, dense_operator(winv * drop), 2, rng).verified;
    complete += projection_verify(a, p, dense_operator(winv * keep), 2, rng).verified;
  }
  const double freq = false_accept / 400.0;
  return {freq <= 0.25 && complete == 400, "false acceptance " + std::to_string(false_accept) + "/400 (" +
                                               fmt(freq, 3) + "), completeness " + std::to_string(complete) +
                                               "/400"};
}

Outcome nullspace_exactness() {
  Rng rng(808);
  for (u64 p : {2, 3, 101, 65521}) {
    PrimeField f(p);
    for (int t = 0; t < 10; ++t) {
      const std::size_t n = 4 + rng.below(20);
      const std::size_t rank = rng.below(n);
      DenseMatrix<PrimeField> d(f, n, n);
      for (std::size_t i = 0; i < rank; ++i) d(i, i) = f.one();
      auto a = random_unimodular(f, n, rng) * d * random_unimodular(f, n, rng);
      check_kernel(a, nullspace_sample(dense_operator(a), n - rank, rng));
    }
  }
  // Divisibility of every N in the p-adic pipeline on small dense instances.
  for (u64 p : {2, 3, 97}) {
    for (int t = 0; t < 10; ++t) {
      const unsigned e = 2 + static_cast<unsigned>(rng.below(3));
      LocalIntRing r(p, e);
      const std::size_t n = 6 + rng.below(15);
      std::vector<unsigned> vals;
      const std::size_t nz = 1 + rng.below(n - 2);
      for (std::size_t i = 0; i < nz; ++i) vals.push_back(static_cast<unsigned>(rng.below(e)));
      std::sort(vals.begin(), vals.end());
      auto a = planted_dense(r, n, n, std::span<const unsigned>(vals), rng);
      try {
        auto pair = make_preconditioners(r, n, n, nz + 2, PreconditionerMode::Heuristic, 100.0, rng);
        exactness.divisibility +=
            smith_pe_nullspace(box(a), r, [](u64 x) { return x; }, pair, rng).divisibility_checked;
      } catch (const Error& err) {
        exactness.internal_errors += err.code() == ErrorCode::Internal;
      }
    }
  }
  return {exactness.bad_vectors == 0 && exactness.internal_errors == 0 && exactness.divisibility > 0,
          std::to_string(exactness.vectors - exactness.bad_vectors) + "/" + std::to_string(exactness.vectors) +
              " kernel vectors exact, " + std::to_string(exactness.divisibility) + " divisibility checks, " +
              std::to_string(exactness.internal_errors) + " failures"};
}

Outcome carries_harness() {
  std::size_t violations = 0;
  double min_eq = 1.0;
  std::string freqs;
  for (std::size_t r = 3; r <= 6; ++r) {
    CarryConfig cfg;
    cfg.p = 2;
    cfg.n = 60;
    cfg.r = r;
    cfg.trials = 50;
    cfg.seed = 900 + r;
    auto rep = run_carry_experiment(cfg);
    violations += rep.violation_count();
    const double eq = rep.equality_frequency.size() > 1 && rep.equality_frequency[1] ? *rep.equality_frequency[1] : 0;
    min_eq = std::min(min_eq, eq);
    freqs += (freqs.empty() ? "" : ",") + fmt(eq);
  }
  CarryConfig odd;
  odd.p = 3;
  odd.n = 60;
  odd.r = 3;
  odd.trials = 50;
  odd.seed = 990;
  auto rep = run_carry_experiment(odd);
  std::size_t odd_bad = 0;
  for (const auto& t : rep.trials) odd_bad += t.digit_ranks.size() > 1 && t.digit_ranks[1] > 13;
  if (violations + odd_bad > 0) std::cerr << "  bound violated: counterexample found, investigate\n";
  return {violations == 0 && odd_bad == 0 && min_eq >= 0.5,
          std::to_string(violations) + " violations, M1 equality " + freqs + ", odd p " + std::to_string(odd_bad) +
              " over 13"};
}

Outcome large_instance() {
  Rng rng(1010);
  LocalIntRing r(2039, 4);
  const std::size_t n = 2000, nontrivial = 6, ell = 102;
  std::vector<unsigned> v(94, 0);
  v.insert(v.end(), {1, 1, 2, 2, 3, 3});
  auto a = planted_sparse(r, n, n, std::span<const unsigned>(v), rng, SparsePlantOptions{4, 4});
  SparseBlackBox<LocalIntRing> src(a);
  auto id = [](u64 x) { return x; };
  auto pair = make_preconditioners(r, n, n, ell, PreconditionerMode::Heuristic, 100.0, rng);
  StorageMeter meter;
  auto res = smith_pe_nullspace(src, r, id, pair, rng, {}, &meter);
  exactness.divisibility += res.divisibility_checked;
  auto rep = projection_verify(src.over(r, id), pair.b1(), pair.b2(), 21, rng);
  const bool correct = res.multiplicities.counts == std::vector<std::size_t>{94, 2, 2, 2} &&
                       res.multiplicities.zeros == n - 100;
  const std::size_t cap = 4 * nontrivial * ell;
  return {correct && rep.verified && meter.peak() <= cap,
          std::string(correct ? "correct" : "wrong") + (rep.verified ? ", verified" : ", unverified") + ", " +
              std::to_string(static_cast<double>(a.nnz()) / n).substr(0, 5) + " nnz/row, peak " +
              std::to_string(meter.peak()) + " <= " + std::to_string(cap) + " (pipeline k " + std::to_string(res.k) +
              ")"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit;  // seconds; 0 for none
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {1, "embedding ranks", 5, embedding_ranks},
      {2, "rank system round trip", 1, rank_system_round_trip},
      {3, "smith_fe against the dense oracle", 60, smith_fe_vs_oracle},
      {4, "matvec budget", 0, matvec_budget},
      {5, "100x100 sketch over Z/3^5", 30, sketch_reproduction},
      {6, "preconditioner minors", 30, preconditioner_bound},
      {7, "verification soundness", 60, verification_soundness},
      {8, "nullspace exactness", 0, nullspace_exactness},
      {9, "carries harness", 60, carries_harness},
      {10, "2000x2000 sparse over Z/2039^4", 120, large_instance},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double dt = seconds_since(t0);
    const bool in_time = c.limit == 0 || dt < c.limit;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::cout << "criterion " << c.id << " " << (pass ? "PASS" : "FAIL") << ": " << c.name << ": " << o.detail
              << ", " << fmt(dt) << " s" << (in_time ? "" : " (over " + fmt(c.limit, 0) + " s)") << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
