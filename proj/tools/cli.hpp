#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "rsk/gridfn.hpp"
#include "rsk/norms.hpp"
#include "rsk/operators.hpp"
#include "rsk/profiles.hpp"

namespace rsk::cli {

// Exit statuses.
constexpr int kPass = 0;
constexpr int kFailed = 1;
constexpr int kUnstable = 2;
constexpr int kSpecError = 3;

// Accepts decimals, fractions like 4/3, "inf" and 2^e.
double parse_number(const std::string& s);

// Inline JSON, a path to a JSON file, or nothing when s is a shorthand.
std::optional<nlohmann::json> load_json_arg(const std::string& s);

// Shorthands:
//   norms     lebesgue:p  lorentz:p,q  lz:p,q,a  lz**:p,q,a  glz:p,q,a,b
//             orlicz:power,p  orlicz:powerlog,p,b  orlicz:exp,g  orlicz:expexp,g
//   profiles  power:a  linear  gauss  boltzmann:b  john:n
//   functions indicator:b  indicator:a,b  power:theta[,b]  powerlog:theta,gamma  const:c
// Each also accepts inline JSON or a JSON file.
NormSpec parse_norm(const std::string& s);
Profile parse_profile(const std::string& s);
GridFunction parse_function(const std::string& s, const Grid& grid);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rsk::cli
