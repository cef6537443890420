#include "annulib/io.hpp"

#include <cmath>
#include <fstream>
#include <vector>

namespace annulib {

namespace {

json encodeComplex(cd v) { return json::array({v.real(), v.imag()}); }

cd decodeComplex(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ParseError("parse", std::string(what) + " must be a [re, im] pair");
  const cd v(j[0].get<double>(), j[1].get<double>());
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw ParseError("parse", std::string(what) + " is not finite");
  return v;
}

const json& field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name))
    throw ParseError("parse", std::string("missing field '") + name + "'");
  return j.at(name);
}

int intField(const json& j, const char* name) {
  const json& v = field(j, name);
  if (!v.is_number_integer())
    throw ParseError("parse", std::string("field '") + name +
                                  "' must be an integer");
  return v.get<int>();
}

double numField(const json& j, const char* name) {
  const json& v = field(j, name);
  if (!v.is_number())
    throw ParseError("parse",
                     std::string("field '") + name + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x))
    throw ParseError("parse", std::string("field '") + name + "' is not finite");
  return x;
}

void expectKind(const json& j, const std::string& kind) {
  if (detectKind(j) != kind)
    throw ParseError("parse", "expected kind '" + kind + "', found '" +
                                  detectKind(j) + "'");
}

// Flat row-major [re, im] sample list <-> matrix with theta index outermost.
json encodeMatrix(const Eigen::MatrixXcd& m) {
  json out = json::array();
  for (int j = 0; j < m.rows(); ++j)
    for (int k = 0; k < m.cols(); ++k) out.push_back(encodeComplex(m(j, k)));
  return out;
}

Eigen::MatrixXcd decodeMatrix(const json& j, int rows, int cols,
                              const char* what) {
  if (!j.is_array() || (int)j.size() != rows * cols)
    throw ParseError("parse", std::string(what) + " must list " +
                                  std::to_string(rows * cols) + " samples");
  Eigen::MatrixXcd m(rows, cols);
  int idx = 0;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = decodeComplex(j[idx++], what);
  return m;
}

}  // namespace

std::string detectKind(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw ParseError("parse", "object has no 'kind' field");
  return j.at("kind").get<std::string>();
}

// ---------------------------------------------------------------------------
// Series, diffeos
// ---------------------------------------------------------------------------

json toJson(const FourierSeries& f, const std::string& kind) {
  json coeffs = json::array();
  for (int n = -f.order(); n <= f.order(); ++n) {
    const cd c = f.coeff(n);
    coeffs.push_back(json::array({n, c.real(), c.imag()}));
  }
  return json{{"kind", kind}, {"N", f.order()}, {"coeffs", coeffs}};
}

FourierSeries fourierFromJson(const json& j, const std::string& expect) {
  const std::string kind = detectKind(j);
  if (!expect.empty() && kind != expect)
    throw ParseError("parse",
                     "expected kind '" + expect + "', found '" + kind + "'");
  if (expect.empty() && kind != "fourier" && kind != "curve" &&
      kind != "diffeo")
    throw ParseError("parse", "kind '" + kind + "' is not a series");
  const int N = intField(j, "N");
  if (N < 1 || N > 1 << 20)
    throw ParseError("parse", "mode order out of range");
  FourierSeries f(N);
  const json& coeffs = field(j, "coeffs");
  if (!coeffs.is_array())
    throw ParseError("parse", "'coeffs' must be an array");
  if ((int)coeffs.size() != 2 * N + 1)
    throw ParseError("parse", "'coeffs' must list every mode -N..N exactly "
                              "once (" +
                                  std::to_string(2 * N + 1) + " entries)");
  std::vector<bool> seen(2 * N + 1, false);
  for (const json& e : coeffs) {
    if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() ||
        !e[1].is_number() || !e[2].is_number())
      throw ParseError("parse", "coefficient entries must be [n, re, im]");
    const int n = e[0].get<int>();
    if (n < -N || n > N)
      throw ParseError("parse",
                       "coefficient mode " + std::to_string(n) +
                           " outside order " + std::to_string(N));
    if (seen[n + N])
      throw ParseError("parse",
                       "coefficient mode " + std::to_string(n) + " repeated");
    seen[n + N] = true;
    const cd v(e[1].get<double>(), e[2].get<double>());
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw ParseError("parse", "coefficient is not finite");
    f.setCoeff(n, v);
  }
  return f;
}

json toJson(const CircleDiffeo& phi) {
  return toJson(phi.displacement(), "diffeo");
}

CircleDiffeo diffeoFromJson(const json& j) {
  return CircleDiffeo::fromDisplacement(fourierFromJson(j, "diffeo"));
}

// ---------------------------------------------------------------------------
// Annuli, weldings
// ---------------------------------------------------------------------------

json toJson(const NormalizedAnnulus& a) {
  const int N = a.order();
  json inner = json::array();
  for (int n = 0; n <= N; ++n) inner.push_back(encodeComplex(a.psiPlus().coeff(n)));
  json outer = json::array();
  for (int n = 1; n <= N; ++n)
    outer.push_back(encodeComplex(a.psiMinus().coeff(-n)));
  return json{{"kind", "annulus"}, {"N", N}, {"a", inner}, {"b", outer}};
}

NormalizedAnnulus annulusFromJson(const json& j) {
  expectKind(j, "annulus");
  const int N = intField(j, "N");
  if (N < 1 || N > 1 << 20)
    throw ParseError("parse", "mode order out of range");
  const json& a = field(j, "a");
  const json& b = field(j, "b");
  if (!a.is_array() || (int)a.size() != N + 1)
    throw ParseError("parse", "'a' must list the N+1 inner coefficients");
  if (!b.is_array() || (int)b.size() != N)
    throw ParseError("parse", "'b' must list the N outer coefficients");
  FourierSeries bp(N), bm(N);
  for (int n = 0; n <= N; ++n)
    bp.setCoeff(n, decodeComplex(a[n], "inner coefficient"));
  bm.setCoeff(1, cd(1.0, 0.0));
  for (int n = 1; n <= N; ++n)
    bm.setCoeff(-n, decodeComplex(b[n - 1], "outer coefficient"));
  return NormalizedAnnulus::fromPair(bm, bp, 0.0);
}

json toJson(const WeldingSolution& w) {
  return json{{"kind", "welding"},
              {"f_plus", toJson(w.f_plus, "fourier")},
              {"f_minus", toJson(w.f_minus, "fourier")},
              {"phi", toJson(w.phi)},
              {"residual", w.residual}};
}

WeldingSolution weldingFromJson(const json& j) {
  expectKind(j, "welding");
  WeldingSolution w{fourierFromJson(field(j, "f_plus"), "fourier"),
                    fourierFromJson(field(j, "f_minus"), "fourier"),
                    diffeoFromJson(field(j, "phi")), numField(j, "residual"),
                    {}};
  return w;
}

// ---------------------------------------------------------------------------
// Paths, framings, extension elements
// ---------------------------------------------------------------------------

json toJson(const LiePath& p) {
  return json{{"kind", "liepath"},
              {"N", p.order()},
              {"M", p.timeNodes()},
              {"t0", p.horizon()},
              {"X", encodeMatrix(p.samples())}};
}

LiePath liePathFromJson(const json& j) {
  expectKind(j, "liepath");
  const int N = intField(j, "N");
  const int M = intField(j, "M");
  if (N < 1 || N > 1 << 16 || M < 2 || M > 1 << 20)
    throw ParseError("parse", "grid size out of range");
  const double t0 = numField(j, "t0");
  return LiePath(N, M, t0,
                 decodeMatrix(field(j, "X"), 2 * N + 1, M, "field sample"));
}

json toJson(const Framing& fr) {
  return json{{"kind", "framing"},   {"N", fr.N},
              {"M", fr.M},           {"t0", fr.t0},
              {"h", encodeMatrix(fr.h)}, {"annulus", toJson(fr.annulus)}};
}

Framing framingFromJson(const json& j) {
  expectKind(j, "framing");
  const int N = intField(j, "N");
  const int M = intField(j, "M");
  if (N < 1 || N > 1 << 16 || M < 2 || M > 1 << 20)
    throw ParseError("parse", "grid size out of range");
  const double t0 = numField(j, "t0");
  if (!(t0 > 0.0)) throw ParseError("parse", "horizon must be positive");
  return Framing{N, M, t0,
                 decodeMatrix(field(j, "h"), 2 * N + 1, M, "framing sample"),
                 annulusFromJson(field(j, "annulus"))};
}

json toJson(const VirasoroElement& e) {
  return json{{"kind", "velement"},
              {"annulus", toJson(e.annulus)},
              {"path", toJson(e.path)},
              {"winding", e.winding},
              {"central", encodeComplex(e.central)}};
}

VirasoroElement velementFromJson(const json& j) {
  expectKind(j, "velement");
  return VirasoroElement{annulusFromJson(field(j, "annulus")),
                         liePathFromJson(field(j, "path")),
                         intField(j, "winding"),
                         decodeComplex(field(j, "central"), "central")};
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

json readJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw ParseError("parse", "cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError("parse", std::string("invalid JSON: ") + e.what());
  }
}

void writeJsonFile(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out)
    throw Error("io", "cannot write '" + path.string() + "'");
  out << dumpJson(j);
}

std::string dumpJson(const json& j) { return j.dump(2) + "\n"; }

}  // namespace annulib
