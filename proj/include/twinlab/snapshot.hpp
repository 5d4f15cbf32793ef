#pragma once

#include <string>
#include <vector>

#include "twinlab/grid.hpp"

namespace twinlab {

// Text snapshot format (see README): magic line "twinlab-field v1", optional
// '#' comment lines, "kind displacement|sign", "N <cells>", then the values in
// lexicographic (i,j,k) order - one "u1 u2 u3" line per vertex, or one +-1 per
// cell. Values are printed with %.17g so round-trips are exact.

void write_displacement(const std::string& path, const DisplacementField& u,
                        const std::vector<std::string>& comments = {});
DisplacementField read_displacement(const std::string& path);

void write_sign(const std::string& path, const SignField& s,
                const std::vector<std::string>& comments = {});
SignField read_sign(const std::string& path);

}  // namespace twinlab
