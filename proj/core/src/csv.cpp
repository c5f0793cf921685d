#include "metro/csv.hpp"

#include <array>
#include <charconv>
#include <stdexcept>

namespace metro {

std::string format_number(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) throw std::runtime_error("format_number: conversion failed");
    return std::string(buf.data(), ptr);
}

void write_trajectory_csv(std::ostream& out, const TrajectoryLog& log) {
    out << "k,j,departure,dwell,run,headway\n";
    for (std::size_t k = 1; k <= log.events(); ++k)
        for (std::size_t j = 0; j < log.segments(); ++j)
            out << k << ',' << j << ',' << format_number(log.departure(k, j)) << ','
                << format_number(log.dwell(k, j)) << ',' << format_number(log.run(k, j)) << ','
                << format_number(log.headway(k, j)) << '\n';
}

void write_sweep_csv(std::ostream& out, const SweepGrid& grid) {
    out << "m,demand_scale,x_mean,X_mean,headway_s,frequency_hz,phase,term1,term2,term3\n";
    for (const auto& c : grid.cells) {
        out << c.trains << ',' << format_number(c.demand_scale) << ',';
        if (!c.valid) {
            out << ",,,,INVALID,,,\n";
            continue;
        }
        const auto& r = c.result;
        out << format_number(c.demand.x_mean) << ',' << format_number(c.demand.X_mean) << ','
            << format_number(r.headway) << ',' << format_number(r.frequency) << ',' << to_string(r.phase) << ','
            << format_number(r.terms[0]) << ',' << format_number(r.terms[1]) << ',' << format_number(r.terms[2])
            << '\n';
    }
}

}  // namespace metro
