#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ultraslow/types.hpp"

namespace ultraslow::cli {

/// Numeric table: the first column is the abscissa.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<real>> rows;
};

void write_csv(const Table& t, std::ostream& out);
void write_json(const Table& t, std::ostream& out);
/// Minimal SVG 1.1: axes, one polyline per column after the first.
void write_svg(const Table& t, std::ostream& out, bool log_x, bool log_y, const std::string& title);

/// key = value lines ('#' comments, optional [section] headers that prefix
/// keys as section.key).  Unknown keys and bad values throw DomainError.
EvalConfig apply_config_text(const std::string& text, EvalConfig base);
EvalConfig load_config_file(const std::string& path, EvalConfig base);

/// Runs one command line; returns 0 on success, 1 on a failed verification
/// or evaluation error, 2 on bad flags.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ultraslow::cli
