#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "phaseprior/prox.hpp"
#include "phaseprior/random.hpp"

using namespace phaseprior;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Problem {
  MeasurementOperator op;
  MeasurementSet meas;
};

Problem make_problem(std::size_t h, std::size_t w, double alpha, double sigma_n,
                     std::uint64_t seed) {
  MeasurementOperator op(h, w, make_diffuser(h * w, seed), make_mask(h * w, alpha, seed + 7));
  auto truth = complex_gaussian(h, w, seed + 13);
  auto meas = measure(op, truth, sigma_n, seed + 21);
  return {std::move(op), std::move(meas)};
}

double prox_objective(const Problem& p, const ComplexImage& z, const ComplexImage& x,
                      double lambda) {
  double d = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) d += std::norm(z[i] - x[i]);
  return 0.5 * d + lambda * oracle::fidelity(p.op.diffuser().signs, p.meas.indices, p.meas.y, z);
}

}  // namespace

TEST(ScalarProx, WorkedExample) {
  const Complex z = scalar_prox(Complex(1.0, 0.0), 2.0, 1.0);
  EXPECT_NEAR(z.real(), 1.5, 1e-15);
  EXPECT_EQ(z.imag(), 0.0);
  EXPECT_NEAR(std::abs(oracle::grid_prox(Complex(1.0, 0.0), 2.0, 1.0) - z), 0.0, 1e-6);
}

TEST(ScalarProx, MatchedAmplitudeIsFixed) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> n;
  for (int i = 0; i < 50; ++i) {
    const Complex x(n(gen), n(gen));
    const double lambda = std::exp(n(gen));
    EXPECT_NEAR(std::abs(scalar_prox(x, std::abs(x), lambda) - x), 0.0, 1e-14);
    EXPECT_EQ(scalar_prox(x, 3.0 * n(gen), 0.0), x);
  }
}

TEST(ScalarProx, InfiniteWeightProjects) {
  const Complex x = std::polar(3.0, std::numbers::pi / 4);
  EXPECT_EQ(scalar_prox(x, 0.0, kInf), Complex(0.0, 0.0));
  const Complex z = scalar_prox(x, 1.5, kInf);
  EXPECT_NEAR(std::abs(z), 1.5, 1e-15);
  EXPECT_NEAR(std::arg(z), std::numbers::pi / 4, 1e-15);
}

TEST(ScalarProx, ZeroInputUsesRealAxis) {
  const Complex z = scalar_prox(Complex(0.0, 0.0), 2.0, 3.0);
  EXPECT_NEAR(z.real(), 1.5, 1e-15);
  EXPECT_EQ(z.imag(), 0.0);
}

TEST(ScalarProx, NegativeTargetClampsAtZero) {
  EXPECT_EQ(scalar_prox(Complex(0.1, 0.1), -1.0, 2.0), Complex(0.0, 0.0));
  const Complex z = scalar_prox(Complex(2.0, 0.0), -0.5, 1.0);
  EXPECT_NEAR(z.real(), 0.75, 1e-15);
}

TEST(ScalarProx, NegativeWeightRejected) {
  EXPECT_THROW(scalar_prox(Complex(1.0, 0.0), 1.0, -1.0), InvalidParameter);
}

TEST(ScalarProx, AgreesWithGridSearch) {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 60; ++i) {
    const Complex x = i % 10 == 0 ? Complex(0.0) : Complex(u(gen), u(gen));
    const double y = 1.5 * u(gen) + 0.5;
    const double lambda = std::exp(2.0 * u(gen));
    const Complex got = scalar_prox(x, y, lambda);
    const Complex ref = oracle::grid_prox(x, y, lambda);
    if (x == Complex(0.0)) {
      EXPECT_NEAR(std::abs(got), std::abs(ref), 1e-5);
    } else {
      EXPECT_NEAR(std::abs(got - ref), 0.0, 1e-5) << x << " y=" << y << " l=" << lambda;
    }
  }
}

TEST(ScalarProx, NonexpansiveAlongARay) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    const double theta = 3.0 * u(gen);
    const Complex a = std::polar(u(gen), theta), b = std::polar(u(gen), theta);
    const double y = u(gen), lambda = u(gen);
    EXPECT_LE(std::abs(scalar_prox(a, y, lambda) - scalar_prox(b, y, lambda)),
              std::abs(a - b) + 1e-15);
  }
}

TEST(ScalarProx, PreservesPhase) {
  std::mt19937_64 gen(4);
  std::normal_distribution<double> n;
  for (int i = 0; i < 200; ++i) {
    const Complex x(n(gen), n(gen));
    const Complex z = scalar_prox(x, n(gen), std::abs(n(gen)));
    if (std::abs(z) > 0) EXPECT_NEAR(std::arg(z), std::arg(x), 1e-12);
  }
}

TEST(MaskedProx, EmptyAndZeroWeightAreIdentity) {
  std::mt19937_64 gen(5);
  const auto x = oracle::random_complex(4, 4, gen);
  const auto empty = SamplingMask::from_indices(16, {}, 0.5, 0);
  EXPECT_EQ(masked_prox(x, {}, empty, 2.0), x);
  const auto full = make_mask(16, 1.0, 0);
  const std::vector<double> y(16, 0.7);
  EXPECT_EQ(masked_prox(x, y, full, 0.0), x);
}

TEST(MaskedProx, SeparableAcrossEntries) {
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> u(-0.3, 2.0);
  const auto x = oracle::random_complex(8, 8, gen);
  const auto mask = make_mask(64, 0.5, 77);
  std::vector<double> y(mask.m());
  for (auto& v : y) v = u(gen);
  const auto out = masked_prox(x, y, mask, 0.8);
  std::size_t j = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (mask.keep[i]) {
      EXPECT_EQ(out[i], scalar_prox(x[i], y[j++], 0.8));
    } else {
      EXPECT_EQ(out[i], x[i]);
    }
  }
}

TEST(MaskedProx, LengthMismatchRejected) {
  const auto mask = make_mask(16, 1.0, 0);
  EXPECT_THROW(masked_prox(ComplexImage(4, 4), std::vector<double>(15), mask, 1.0),
               InvalidDimension);
}

TEST(DataProx, ZeroWeightAndConsistentDataAreFixedPoints) {
  const auto p = make_problem(8, 8, 0.7, 0.0, 1);
  std::mt19937_64 gen(7);
  const auto x = oracle::random_complex(8, 8, gen);
  const auto same = data_prox(p.op, x, p.meas, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(std::abs(same[i] - x[i]), 0.0, 1e-14);

  const auto consistent = measure(p.op, x, 0.0, 0);
  const auto fixed = data_prox(p.op, x, consistent, 5.0);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(std::abs(fixed[i] - x[i]), 0.0, 1e-13);
}

TEST(DataProx, EqualsInlinedComposition) {
  const auto p = make_problem(6, 10, 0.5, 0.1, 2);
  std::mt19937_64 gen(8);
  const auto x = oracle::random_complex(6, 10, gen);
  const auto direct = data_prox(p.op, x, p.meas, 0.9);
  auto u = p.op.apply_unitary(x);
  masked_prox_inplace(u.values(), p.meas.y, p.op.mask(), 0.9);
  EXPECT_EQ(direct, p.op.adjoint_unitary(u));
}

TEST(DataProx, MatchesNumericalMinimizer) {
  std::mt19937_64 gen(9);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto p = make_problem(4, 4, 1.0, 0.05, 100 + seed);
    const auto x = oracle::random_complex(4, 4, gen);
    const double lambda = 0.7;
    const auto& signs = p.op.diffuser().signs;

    // Gradient descent on 1/2||z-x||^2 + lambda f(z) from several starts,
    // all computed with the direct DFT.
    ComplexImage best;
    double best_value = std::numeric_limits<double>::infinity();
    for (int start = 0; start < 6; ++start) {
      ComplexImage z = start == 0 ? x : oracle::random_complex(4, 4, gen);
      const double step = 1.0 / (1.0 + lambda);
      for (int it = 0; it < 3000; ++it) {
        const auto u = oracle::forward(signs, z);
        ComplexImage r(4, 4);
        for (std::size_t i = 0; i < p.meas.indices.size(); ++i) {
          const auto k = p.meas.indices[i];
          const double a = std::abs(u[k]);
          r[k] = a > 0 ? u[k] - p.meas.y[i] * u[k] / a : Complex(0.0);
        }
        ComplexImage back = r;
        for (auto& v : back) v = std::conj(v);
        back = oracle::dft2(back);
        for (std::size_t i = 0; i < z.size(); ++i) {
          const Complex g = (z[i] - x[i]) + lambda * double(signs[i]) * std::conj(back[i]);
          z[i] -= step * g;
        }
      }
      const double v = prox_objective(p, z, x, lambda);
      if (v < best_value) {
        best_value = v;
        best = z;
      }
    }
    const auto closed = data_prox(p.op, x, p.meas, lambda);
    EXPECT_LE(prox_objective(p, closed, x, lambda), best_value + 1e-12);
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(std::abs(closed[i] - best[i]), 0.0, 1e-5);
  }
}

TEST(DataProx, BeatsRandomPerturbations) {
  std::mt19937_64 gen(10);
  std::normal_distribution<double> n;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto p = make_problem(4, 4, 0.6, 0.2, 300 + seed);
    const auto x = oracle::random_complex(4, 4, gen);
    const double lambda = std::exp(n(gen));
    const auto z = data_prox(p.op, x, p.meas, lambda);
    const double base = prox_objective(p, z, x, lambda);
    for (int k = 0; k < 100; ++k) {
      auto d = oracle::random_complex(4, 4, gen);
      const double scale = 1e-3 / norm(d);
      auto q = z;
      for (std::size_t i = 0; i < q.size(); ++i) q[i] += scale * d[i];
      EXPECT_LE(base, prox_objective(p, q, x, lambda));
    }
  }
}

TEST(DataProx, ShapeMismatchRejected) {
  const auto p = make_problem(4, 4, 1.0, 0.0, 1);
  EXPECT_THROW(data_prox(p.op, ComplexImage(4, 3), p.meas, 1.0), InvalidDimension);
  auto bad = p.meas;
  bad.y.pop_back();
  EXPECT_THROW(data_prox(p.op, ComplexImage(4, 4), bad, 1.0), InvalidDimension);
}

TEST(DataFidelity, MatchesDirectSumAndGradient) {
  const auto p = make_problem(5, 6, 0.7, 0.1, 4);
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 5; ++trial) {
    const auto x = oracle::random_complex(5, 6, gen);
    const double f = data_fidelity(p.op, x, p.meas);
    EXPECT_NEAR(f, oracle::fidelity(p.op.diffuser().signs, p.meas.indices, p.meas.y, x),
                1e-12 * std::max(1.0, f));
    const auto g = data_gradient(p.op, x, p.meas);
    double diff = 0.0, ref = 0.0;
    const double h = 1e-6;
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (const Complex dir : {Complex(h, 0), Complex(0, h)}) {
        auto a = x, b = x;
        a[i] += dir;
        b[i] -= dir;
        const double fd = (data_fidelity(p.op, a, p.meas) - data_fidelity(p.op, b, p.meas)) / (2 * h);
        const double an = dir.real() != 0 ? g[i].real() : g[i].imag();
        diff += (fd - an) * (fd - an);
        ref += fd * fd;
      }
    }
    EXPECT_LT(std::sqrt(diff / ref), 1e-4);
  }
}
