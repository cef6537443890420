#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "annulib/virasoro.hpp"
#include "annulib/welding.hpp"

namespace annulib {

using json = nlohmann::json;

// Serialized kinds:
//   fourier / curve / diffeo : {"kind", "N", "coeffs": [[n, re, im], ...]}
//   annulus  : {"kind", "N", "a": [[re, im], ...], "b": [[re, im], ...]}
//              a = Taylor coefficients a_0..a_N of the inner map,
//              b = coefficients of z^{-1}..z^{-N} of the outer map
//   welding  : {"kind", "f_plus", "f_minus", "phi", "residual"}
//   liepath  : {"kind", "N", "M", "t0", "X": [[re, im], ...]} with the field
//              samples listed row-major, theta index outermost
//   framing  : like liepath with "h" samples plus an embedded "annulus"
//   velement : {"kind", "annulus", "path", "winding", "central": [re, im]}
// Writing is deterministic: keys are emitted sorted and numbers use the
// shortest round-trip form, so identical objects give identical bytes.

json toJson(const FourierSeries& f, const std::string& kind = "fourier");
json toJson(const CircleDiffeo& phi);
json toJson(const NormalizedAnnulus& a);
json toJson(const WeldingSolution& w);
json toJson(const LiePath& p);
json toJson(const Framing& fr);
json toJson(const VirasoroElement& e);

FourierSeries fourierFromJson(const json& j,
                              const std::string& expectKind = "");
CircleDiffeo diffeoFromJson(const json& j);
NormalizedAnnulus annulusFromJson(const json& j);
WeldingSolution weldingFromJson(const json& j);
LiePath liePathFromJson(const json& j);
Framing framingFromJson(const json& j);
VirasoroElement velementFromJson(const json& j);

// The "kind" discriminator of a serialized object.
std::string detectKind(const json& j);

json readJsonFile(const std::filesystem::path& path);
void writeJsonFile(const std::filesystem::path& path, const json& j);
std::string dumpJson(const json& j);

}  // namespace annulib
