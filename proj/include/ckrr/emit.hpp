#pragma once

#include <string>

#include "ckrr/experiments.hpp"

namespace ckrr {

// Deterministic "%.12g" rendering shared by every CSV writer.
std::string format_number(double v);

// Header `axis,value,train_mse,test_mse,test_mse_ci95,c_con,c_con_ci95,reps`
// plus one line per row; NaN cells render as "nan".
std::string format_sweep_csv(const SweepResult& result);

// Minimal line plot (mean curve per axis label with a CI band), well-formed XML.
std::string render_sweep_svg(const SweepResult& result);

// Writes the CSV, and the SVG when svg_path is nonempty and the result has rows.
void emit_outputs(const SweepResult& result, const std::string& csv_path,
                  const std::string& svg_path);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace ckrr
