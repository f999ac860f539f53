#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "jsq/grid_path.hpp"
#include "jsq/limit_solver.hpp"

namespace jsq {

/// Decimal rendering with 12 significant digits and no exponent.
std::string format_decimal(double value);

/// `t,x1,...,xk` header and one row per grid point.
void write_grid_csv(std::ostream& out, const GridPath& path, const std::string& prefix = "x");

/// `t,x1,...,xk,u1,u2` header and one row per grid point.
void write_limit_csv(std::ostream& out, const LimitSolution& solution);

/// Plain table writer; cells are written verbatim.
void write_table_csv(std::ostream& out, const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows);

}  // namespace jsq
