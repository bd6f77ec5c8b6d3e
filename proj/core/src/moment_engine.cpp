#include "emm/moment_engine.hpp"

#include <boost/multiprecision/mpfr.hpp>

#include <ostream>
#include <string>

namespace emm {

namespace {

Real precision_floor(int exponent) {
  // 10^-exponent at working precision
  return pow(Real(10), -exponent);
}

void require_mhat(const GeneratorTable& t, const char* where) {
  if (t.stage != TableStage::MHat) {
    throw Error(ErrorCode::InvalidArgument, std::string(where) + ": expected an MHat table");
  }
}

}  // namespace

std::string_view to_string(TableStage stage) {
  switch (stage) {
    case TableStage::MTilde: return "MTILDE";
    case TableStage::M: return "M";
    case TableStage::MHat: return "MHAT";
  }
  return "UNKNOWN";
}

RecursionBand recursion_band(const RotationParams& params, int p) {
  if (p < -2) throw Error(ErrorCode::InvalidArgument, "recursion band needs p >= -2");
  const Real& E = params.energy;
  const Real& b = params.b;
  const Real& c2 = params.c2;
  const Real& s2 = params.s2;
  const Real& s5 = params.s5;
  const Real P(p);
  const Real P2 = P * P;
  const Real P3 = P2 * P;

  const Real es2 = E * s2;
  const Real b2 = b * b;
  const Real b3 = b2 * b;
  const Real b4 = b3 * b;
  const Real b5 = b4 * b;
  const Real e3s2cube = es2 * es2 * es2;
  const Real es2sq = es2 * es2;

  RecursionBand band;
  band.p = p;
  band.at(-3) = -3 * es2 / b * P * (4 - 4 * P - P2 + P3);
  band.at(-2) = -3 * es2 / b2 * P * (-4 - P + 4 * P2 + P3);
  band.at(-1) = -es2 / b3 * P * (P + 2) * (6 + 12 * b2 * c2 * E + 7 * P + P2 - 12 * b5 * s5);
  band.at(0) = 6 * es2 / b2 * (-2 * c2 * E * (4 + 5 * P + P2) + s5 * b3 * (14 + 25 * P + 8 * P2));
  band.at(1) = 2 * es2 / b3 * (-2 * c2 * E * (12 + 8 * P + P2) + b3 * s5 * (168 + 169 * P + 38 * P2));
  band.at(2) = 12 * es2 * s5 / b * (42 + 30 * P + 5 * P2);
  band.at(3) = 6 * es2 / b3 * (18 * es2sq + b * s5 * (56 + 31 * P + 4 * P2));
  band.at(4) = 2 * es2 / b4 * (162 * es2sq + b * s5 * (42 + 19 * P + 2 * P2));
  band.at(5) = 432 * e3s2cube / b5;
  band.at(6) = 324 * e3s2cube / (b5 * b);
  band.at(7) = 144 * e3s2cube / (b5 * b2);
  band.at(8) = 36 * e3s2cube / (b5 * b3);
  band.at(9) = 4 * e3s2cube / (b5 * b4);
  return band;
}

std::array<Real, 14> closure_combination(const RotationParams& params) {
  const RecursionBand minus1 = recursion_band(params, -1);
  const RecursionBand minus2 = recursion_band(params, -2);
  const Real half_b = params.b / 2;
  std::array<Real, 14> out;
  for (auto& v : out) v = 0;
  // index k <-> mu_{k-5}
  for (int off = RecursionBand::kLowOffset; off <= RecursionBand::kHighOffset; ++off) {
    out[static_cast<std::size_t>(-1 + off + 5)] += minus1.at(off);
    // The p = -2 relation reaches mu_7 at most; its mu_{-5} entry vanishes identically.
    const int idx2 = -2 + off + 5;
    if (idx2 >= 0) out[static_cast<std::size_t>(idx2)] -= half_b * minus2.at(off);
  }
  return out;
}

Real recursion_residual(const RecursionBand& band, std::span<const Real> moments) {
  Real sum = 0;
  Real scale = 0;
  for (int off = RecursionBand::kLowOffset; off <= RecursionBand::kHighOffset; ++off) {
    const int idx = band.p + off;
    if (idx < 0) continue;
    if (static_cast<std::size_t>(idx) >= moments.size()) {
      throw Error(ErrorCode::IndexRange, "recursion residual needs moment " + std::to_string(idx));
    }
    const Real term = band.at(off) * moments[static_cast<std::size_t>(idx)];
    sum += term;
    if (abs(term) > scale) scale = abs(term);
  }
  if (scale == 0) return Real(0);
  return abs(sum) / scale;
}

GeneratorTable generate_mtilde(const RotationParams& params, int p_max) {
  if (p_max < 9) throw Error(ErrorCode::InvalidArgument, "generate_mtilde needs p_max >= 9");
  constexpr std::size_t cols = 9;
  GeneratorTable table;
  table.stage = TableStage::MTilde;
  table.p_max = p_max;
  table.rows = RealMatrix(static_cast<std::size_t>(p_max) + 1, cols);
  for (std::size_t i = 0; i < cols; ++i) table.rows(i, i) = 1;

  const Real tolerance = precision_floor(params.precision_digits / 2);
  for (int p = 0; p + 9 <= p_max; ++p) {
    const RecursionBand band = recursion_band(params, p);
    const Real& lead = band.at(9);
    const auto target = static_cast<std::size_t>(p + 9);
    for (std::size_t col = 0; col < cols; ++col) {
      Real acc = 0;
      Real scale = 0;
      for (int off = RecursionBand::kLowOffset; off <= 8; ++off) {
        const int idx = p + off;
        if (idx < 0) continue;  // coefficient vanishes identically for p in {0,1,2}
        const Real term = band.at(off) * table.rows(static_cast<std::size_t>(idx), col);
        acc += term;
        if (abs(term) > scale) scale = abs(term);
      }
      table.rows(target, col) = -acc / lead;
      // Residual of the solved row, relative to the largest term in it.
      const Real residual = abs(acc + lead * table.rows(target, col));
      if (scale > 0 && residual > tolerance * scale) {
        throw Error(ErrorCode::PrecisionLoss,
                    "recursion residual " + format_sci(residual / scale, 6) + " at row " + std::to_string(p + 9));
      }
    }
  }
  return table;
}

Mu8Constraint mu8_constraint(const RotationParams& params) {
  const auto combo = closure_combination(params);
  // mu_l sits at index l + 5
  const Real& lead = combo[13];
  if (lead == 0) throw Error(ErrorCode::PrecisionLoss, "mu_8 coefficient of the closure relation vanished");
  Mu8Constraint c;
  for (std::size_t l = 0; l < 8; ++l) c.weights[l] = -combo[l + 5] / lead;
  return c;
}

GeneratorTable generate_m(const GeneratorTable& mtilde, const Mu8Constraint& mu8) {
  if (mtilde.stage != TableStage::MTilde) throw Error(ErrorCode::InvalidArgument, "generate_m expects an MTilde table");
  GeneratorTable table;
  table.stage = TableStage::M;
  table.p_max = mtilde.p_max;
  table.rows = RealMatrix(static_cast<std::size_t>(mtilde.p_max) + 1, 8);
  for (std::size_t i = 0; i < 8; ++i) table.rows(i, i) = 1;
  for (std::size_t l = 0; l < 8; ++l) table.rows(8, l) = mu8.weights[l];
  for (std::size_t p = 9; p <= static_cast<std::size_t>(mtilde.p_max); ++p) {
    const Real& via8 = mtilde.rows(p, 8);
    for (std::size_t l = 0; l < 8; ++l) table.rows(p, l) = mtilde.rows(p, l) + via8 * mu8.weights[l];
  }
  return table;
}

GeneratorTable generate_m(const RotationParams& params, int p_max) {
  return generate_m(generate_mtilde(params, p_max), mu8_constraint(params));
}

EvenMap build_even_map(const GeneratorTable& m_table) {
  if (m_table.stage != TableStage::M) throw Error(ErrorCode::InvalidArgument, "build_even_map expects an M table");
  if (m_table.p_max < 14) throw Error(ErrorCode::IndexRange, "even map needs M rows through 14");
  EvenMap map;
  map.forward = RealMatrix(8, 8);
  for (std::size_t l = 0; l < 8; ++l) {
    for (std::size_t v = 0; v < 8; ++v) map.forward(l, v) = m_table.rows(2 * l, v);
  }
  auto inv = invert(map.forward);
  if (!inv) throw Error(ErrorCode::SingularEvenMap, "even-moment map has a zero pivot");
  map.inverse = std::move(inv->inverse);
  map.determinant = std::move(inv->determinant);
  map.condition = norm_one(map.forward) * norm_one(map.inverse);
  const int digits = working_digits();
  if (map.condition > pow(Real(10), digits - 10)) {
    throw Error(ErrorCode::SingularEvenMap, "even-moment map condition " + format_sci(map.condition, 6));
  }
  return map;
}

GeneratorTable generate_mhat(const GeneratorTable& m_table, const EvenMap& even_map) {
  if (m_table.stage != TableStage::M) throw Error(ErrorCode::InvalidArgument, "generate_mhat expects an M table");
  // Moments in terms of u_0..u_7, then u_0 = 1 - sum u_l folded into column 0.
  const RealMatrix in_u = multiply(m_table.rows, even_map.inverse);
  GeneratorTable table;
  table.stage = TableStage::MHat;
  table.p_max = m_table.p_max;
  table.rows = RealMatrix(in_u.rows(), 8);
  for (std::size_t p = 0; p < in_u.rows(); ++p) {
    const Real& base = in_u(p, 0);
    table.rows(p, 0) = base;
    for (std::size_t l = 1; l < 8; ++l) table.rows(p, l) = in_u(p, l) - base;
  }
  return table;
}

GeneratorTable generate_mhat(const RotationParams& params, int p_max) {
  const GeneratorTable m = generate_m(params, p_max);
  return generate_mhat(m, build_even_map(m));
}

std::vector<Real> moments_from_u(const GeneratorTable& mhat, std::span<const Real> u_hat) {
  require_mhat(mhat, "moments_from_u");
  if (u_hat.size() != 7) throw Error(ErrorCode::InvalidArgument, "u_hat must have 7 entries");
  std::vector<Real> mu(mhat.rows.rows());
  for (std::size_t p = 0; p < mu.size(); ++p) {
    const auto row = mhat.rows.row(p);
    Real acc = row[0];
    for (std::size_t l = 1; l < 8; ++l) acc += row[l] * u_hat[l - 1];
    mu[p] = std::move(acc);
  }
  return mu;
}

void write_table_csv(std::ostream& out, const GeneratorTable& table, int significant_digits) {
  out << "p";
  for (std::size_t c = 0; c < table.columns(); ++c) out << ",c" << c;
  out << '\n';
  for (std::size_t p = 0; p < table.rows.rows(); ++p) {
    out << p;
    for (std::size_t c = 0; c < table.columns(); ++c) out << ',' << format_sci(table.rows(p, c), significant_digits);
    out << '\n';
  }
}

}  // namespace emm
