#pragma once

#include "chemo/field.hpp"

#include <string>
#include <utility>

namespace chemo {

/// CSV with columns x[,y],u,v in storage order, 17 significant digits.
void write_snapshot(const std::string& path, const ScalarField& u, const ScalarField& v);

/// Reads a snapshot written for `grid`; node coordinates must match.
std::pair<ScalarField, ScalarField> read_snapshot(const std::string& path, const Grid& grid);

}  // namespace chemo
