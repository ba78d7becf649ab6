#pragma once

#include <string>

#include "torusgas/grid.hpp"

namespace torusgas {

// CSV layout: "d,T,n" header row, one row with those values, then n^d values
// in row-major lexicographic order, one per line.
void write_field_csv(const GridField& field, const std::string& path);
GridField read_field_csv(const std::string& path);

// Binary layout (little endian): "TGF1", int32 d, float64 T, int32 n, then
// n^d float64 values in the same order as the CSV.
void write_field_binary(const GridField& field, const std::string& path);
GridField read_field_binary(const std::string& path);

// Dispatches on the extension (.csv, anything else binary).
GridField read_field(const std::string& path);

}  // namespace torusgas
