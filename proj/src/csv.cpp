#include "ecoplus/csv.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ecoplus {

std::string format_g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const std::vector<double>* rates) {
    if (!traj.shape_consistent()) throw std::invalid_argument("trajectory arrays inconsistent");
    if (rates && static_cast<int>(rates->size()) != traj.horizon)
        throw std::invalid_argument("rate column must have one entry per step");
    os << "i,t,x,v,a,u,J";
    if (rates) os << ",rate";
    os << "\n";
    for (int i = 0; i <= traj.horizon; ++i) {
        os << i << ',' << format_g9(i * traj.dt) << ',' << format_g9(traj.x[i]) << ','
           << format_g9(traj.v[i]) << ',' << format_g9(traj.a[i]) << ',' << format_g9(traj.u[i]) << ',';
        if (i < traj.horizon) os << format_g9(traj.jerk[i]);
        if (rates) {
            os << ',';
            if (i < traj.horizon) os << format_g9((*rates)[i]);
        }
        os << "\n";
    }
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj, const std::vector<double>* rates) {
    std::ofstream os(path);
    if (!os) throw std::invalid_argument("cannot open for writing: " + path);
    write_trajectory_csv(os, traj, rates);
}

Trajectory read_trajectory_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("cannot open trajectory csv: " + path);
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("empty trajectory csv");
    if (line.rfind("i,t,x,v,a,u,J", 0) != 0)
        throw std::invalid_argument("unexpected trajectory csv header: " + line);

    std::vector<std::array<double, 7>> rows;
    std::vector<bool> has_jerk;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::array<double, 7> row{};
        bool jerk_present = false;
        for (int c = 0; c < 7; ++c) {
            if (!std::getline(ls, cell, ',')) {
                if (c == 6) { cell.clear(); }
                else throw std::invalid_argument("short trajectory csv row: " + line);
            }
            if (c == 6) {
                jerk_present = !cell.empty();
                row[c] = jerk_present ? std::stod(cell) : 0.0;
            } else {
                row[c] = std::stod(cell);
            }
        }
        rows.push_back(row);
        has_jerk.push_back(jerk_present);
    }
    if (rows.size() < 2) throw std::invalid_argument("trajectory csv needs at least two rows");
    const int h = static_cast<int>(rows.size()) - 1;
    Trajectory traj;
    traj.dt = rows[1][1] - rows[0][1];
    if (!(traj.dt > 0.0)) throw std::invalid_argument("trajectory csv: nonpositive time step");
    traj.resize(h);
    for (int i = 0; i <= h; ++i) {
        traj.x[i] = rows[i][2];
        traj.v[i] = rows[i][3];
        traj.a[i] = rows[i][4];
        traj.u[i] = rows[i][5];
        if (i < h) {
            if (!has_jerk[i]) throw std::invalid_argument("trajectory csv: missing jerk before final row");
            traj.jerk[i] = rows[i][6];
        }
    }
    return traj;
}

void write_pwa_csv(std::ostream& os, const PwaSegments& seg) {
    os << "k,b1,b2\n";
    for (int k = 0; k < seg.segments; ++k)
        os << (k + 1) << ',' << format_g9(seg.b1[k]) << ',' << format_g9(seg.b2[k]) << "\n";
}

} // namespace ecoplus
