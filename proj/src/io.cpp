#include "psir/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace psir {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::vector<std::string>& allowed,
                const std::string& block, std::vector<std::string>& errors) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            errors.push_back("unknown key '" + block + it.key() + "'");
    }
}

double get_num(const json& obj, const char* key, double fallback,
               std::vector<std::string>& errors, const std::string& block) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) {
        errors.push_back("'" + block + key + "' must be a number");
        return fallback;
    }
    return obj[key].get<double>();
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = (v >> (8 * i)) & 0xff;
    os.write(reinterpret_cast<const char*>(b), 4);
}
void write_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = (v >> (8 * i)) & 0xff;
    os.write(reinterpret_cast<const char*>(b), 8);
}
void write_f64(std::ostream& os, double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, 8);
    write_u64(os, u);
}
std::uint32_t read_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(b[i]) << (8 * i);
    return v;
}
std::uint64_t read_u64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
    return v;
}
double read_f64(std::istream& is) {
    std::uint64_t u = read_u64(is);
    double v;
    std::memcpy(&v, &u, 8);
    return v;
}

void write_field_header(std::ostream& os, int kind, const Grid3& g) {
    os.write("PSF1", 4);
    write_u32(os, 1);
    char k = char(kind);
    os.write(&k, 1);
    write_u64(os, std::uint64_t(g.n1));
    write_u64(os, std::uint64_t(g.n2));
    write_u64(os, std::uint64_t(g.n3));
    write_f64(os, g.bbox.x1min);
    write_f64(os, g.bbox.x1max);
    write_f64(os, g.bbox.x2min);
    write_f64(os, g.bbox.x2max);
    write_f64(os, g.bbox.x3min);
    write_f64(os, g.bbox.x3max);
}

}  // namespace

ConfigDoc make_default_config() {
    ConfigDoc c;
    c.phantom.spheres = {MicrosphereSpec{}};
    return c;
}

ConfigDoc parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config error: top level must be an object");

    std::vector<std::string> errors;
    check_keys(doc, {"geometry", "band", "phantom", "solver", "pipeline"}, "", errors);
    ConfigDoc c = make_default_config();

    if (doc.contains("geometry")) {
        const json& g = doc["geometry"];
        check_keys(g, {"bbox", "gamma_z", "plane_z", "half_width", "plane_m1", "plane_m2"},
                   "geometry.", errors);
        if (g.contains("bbox")) {
            if (g["bbox"].is_array() && g["bbox"].size() == 6) {
                auto v = g["bbox"].get<std::vector<double>>();
                c.bbox = {v[0], v[1], v[2], v[3], v[4], v[5]};
            } else {
                errors.push_back("'geometry.bbox' must be an array of 6 numbers");
            }
        }
        c.gamma_z = get_num(g, "gamma_z", c.gamma_z, errors, "geometry.");
        c.plane_z = get_num(g, "plane_z", c.plane_z, errors, "geometry.");
        c.half_width = get_num(g, "half_width", c.half_width, errors, "geometry.");
        c.plane_m1 = int(get_num(g, "plane_m1", c.plane_m1, errors, "geometry."));
        c.plane_m2 = int(get_num(g, "plane_m2", c.plane_m2, errors, "geometry."));
    }
    if (doc.contains("band")) {
        const json& b = doc["band"];
        check_keys(b, {"k_low", "k_high", "n_intervals"}, "band.", errors);
        c.k_low = get_num(b, "k_low", c.k_low, errors, "band.");
        c.k_high = get_num(b, "k_high", c.k_high, errors, "band.");
        c.n_intervals = int(get_num(b, "n_intervals", c.n_intervals, errors, "band."));
    }
    if (doc.contains("phantom")) {
        const json& p = doc["phantom"];
        check_keys(p, {"spheres"}, "phantom.", errors);
        if (p.contains("spheres")) {
            if (!p["spheres"].is_array()) {
                errors.push_back("'phantom.spheres' must be an array");
            } else {
                c.phantom.spheres.clear();
                for (const json& s : p["spheres"]) {
                    check_keys(s, {"center", "radius", "amplitude"}, "phantom.spheres[].",
                               errors);
                    MicrosphereSpec m;
                    if (s.contains("center")) {
                        if (s["center"].is_array() && s["center"].size() == 3) {
                            auto v = s["center"].get<std::vector<double>>();
                            m.center = {v[0], v[1], v[2]};
                        } else {
                            errors.push_back("'phantom.spheres[].center' must have 3 numbers");
                        }
                    }
                    m.radius = get_num(s, "radius", m.radius, errors, "phantom.spheres[].");
                    m.amplitude =
                        get_num(s, "amplitude", m.amplitude, errors, "phantom.spheres[].");
                    c.phantom.spheres.push_back(m);
                }
            }
        }
    }
    if (doc.contains("solver")) {
        const json& s = doc["solver"];
        check_keys(s,
                   {"ls_tolerance", "ls_max_iterations", "points_per_wavelength",
                    "omega_points_per_wavelength", "memory_budget_bytes"},
                   "solver.", errors);
        c.ls_tolerance = get_num(s, "ls_tolerance", c.ls_tolerance, errors, "solver.");
        c.ls_max_iterations =
            int(get_num(s, "ls_max_iterations", c.ls_max_iterations, errors, "solver."));
        c.points_per_wavelength =
            get_num(s, "points_per_wavelength", c.points_per_wavelength, errors, "solver.");
        c.omega_points_per_wavelength = get_num(s, "omega_points_per_wavelength",
                                                c.omega_points_per_wavelength, errors,
                                                "solver.");
        c.memory_budget = std::uint64_t(
            get_num(s, "memory_budget_bytes", double(c.memory_budget), errors, "solver."));
    }
    if (doc.contains("pipeline")) {
        const json& p = doc["pipeline"];
        check_keys(p,
                   {"noise_level", "seed", "epsilon", "inner_iterations", "c_max", "n0"},
                   "pipeline.", errors);
        c.noise_level = get_num(p, "noise_level", c.noise_level, errors, "pipeline.");
        c.seed = std::uint64_t(get_num(p, "seed", double(c.seed), errors, "pipeline."));
        c.epsilon_p1 = get_num(p, "epsilon", c.epsilon_p1, errors, "pipeline.");
        c.inner_iterations =
            int(get_num(p, "inner_iterations", c.inner_iterations, errors, "pipeline."));
        c.c_max = get_num(p, "c_max", c.c_max, errors, "pipeline.");
        c.n0 = get_num(p, "n0", c.n0, errors, "pipeline.");
    }

    // cross-field consistency
    if (c.k_low >= c.k_high) errors.push_back("'band.k_low' must be smaller than 'band.k_high'");
    if (c.k_low < 1) errors.push_back("'band.k_low' must be >= 1");
    if (c.n_intervals < 1) errors.push_back("'band.n_intervals' must be >= 1");
    if (c.bbox.extent1() <= 0 || c.bbox.extent2() <= 0 || c.bbox.extent3() <= 0)
        errors.push_back("'geometry.bbox' must have positive extents");
    if (c.plane_z <= c.bbox.x3max)
        errors.push_back("'geometry.plane_z' must lie above the box");
    if (c.half_width <= 0) errors.push_back("'geometry.half_width' must be > 0");
    if (c.plane_m1 < 2 || c.plane_m2 < 2)
        errors.push_back("'geometry.plane_m1/m2' must be >= 2");
    if (c.noise_level < 0) errors.push_back("'pipeline.noise_level' must be >= 0");
    if (c.c_max <= 1) errors.push_back("'pipeline.c_max' must be > 1");
    if (c.inner_iterations < 1) errors.push_back("'pipeline.inner_iterations' must be >= 1");

    if (!errors.empty()) {
        std::string msg = "config validation failed:";
        for (const std::string& e : errors) msg += "\n  - " + e;
        throw ConfigError(msg);
    }
    return c;
}

ConfigDoc read_config(const std::string& path) { return parse_config(read_text_file(path)); }

std::string config_to_json(const ConfigDoc& c) {
    json doc;
    doc["geometry"] = {{"bbox",
                        {c.bbox.x1min, c.bbox.x1max, c.bbox.x2min, c.bbox.x2max, c.bbox.x3min,
                         c.bbox.x3max}},
                       {"gamma_z", c.gamma_z},
                       {"plane_z", c.plane_z},
                       {"half_width", c.half_width},
                       {"plane_m1", c.plane_m1},
                       {"plane_m2", c.plane_m2}};
    doc["band"] = {{"k_low", c.k_low}, {"k_high", c.k_high}, {"n_intervals", c.n_intervals}};
    json spheres = json::array();
    for (const MicrosphereSpec& s : c.phantom.spheres)
        spheres.push_back({{"center", {s.center[0], s.center[1], s.center[2]}},
                           {"radius", s.radius},
                           {"amplitude", s.amplitude}});
    doc["phantom"] = {{"spheres", spheres}};
    doc["solver"] = {{"ls_tolerance", c.ls_tolerance},
                     {"ls_max_iterations", c.ls_max_iterations},
                     {"points_per_wavelength", c.points_per_wavelength},
                     {"omega_points_per_wavelength", c.omega_points_per_wavelength},
                     {"memory_budget_bytes", c.memory_budget}};
    doc["pipeline"] = {{"noise_level", c.noise_level}, {"seed", c.seed},
                       {"epsilon", c.epsilon_p1},     {"inner_iterations", c.inner_iterations},
                       {"c_max", c.c_max},            {"n0", c.n0}};
    return doc.dump(2);
}

void write_field(const std::string& path, const RealField3& field) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_field_header(os, 0, field.grid);
    for (double v : field.values) write_f64(os, v);
    if (!os) throw std::runtime_error("write failed on '" + path + "'");
}

void write_field(const std::string& path, const ComplexField3& field) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_field_header(os, 1, field.grid);
    for (cdouble v : field.values) {
        write_f64(os, v.real());
        write_f64(os, v.imag());
    }
    if (!os) throw std::runtime_error("write failed on '" + path + "'");
}

LoadedField read_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open '" + path + "'");
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "PSF1", 4) != 0)
        throw std::runtime_error("'" + path + "': bad magic (not a PSF1 field file)");
    std::uint32_t version = read_u32(is);
    if (version != 1) throw std::runtime_error("'" + path + "': unsupported version");
    char kind;
    is.read(&kind, 1);
    if (kind != 0 && kind != 1) throw std::runtime_error("'" + path + "': bad field kind");
    std::uint64_t n1 = read_u64(is), n2 = read_u64(is), n3 = read_u64(is);
    BBox box;
    box.x1min = read_f64(is);
    box.x1max = read_f64(is);
    box.x2min = read_f64(is);
    box.x2max = read_f64(is);
    box.x3min = read_f64(is);
    box.x3max = read_f64(is);
    if (!is) throw std::runtime_error("'" + path + "': truncated header");
    if (n1 < 2 || n2 < 2 || n3 < 2 || n1 > (1u << 20) || n2 > (1u << 20) || n3 > (1u << 20))
        throw std::runtime_error("'" + path + "': implausible dimensions");
    Grid3 grid(int(n1), int(n2), int(n3), box);

    LoadedField out;
    out.kind = kind;
    const std::size_t total = grid.size();
    if (kind == 0) {
        out.real = RealField3(grid);
        for (std::size_t i = 0; i < total; ++i) out.real.values[i] = read_f64(is);
    } else {
        out.complex = ComplexField3(grid);
        for (std::size_t i = 0; i < total; ++i) {
            double re = read_f64(is);
            double im = read_f64(is);
            out.complex.values[i] = cdouble(re, im);
        }
    }
    if (!is) throw std::runtime_error("'" + path + "': truncated payload");
    char extra;
    if (is.read(&extra, 1)) throw std::runtime_error("'" + path + "': trailing bytes");
    return out;
}

void write_intensity_csv(const std::string& path, const IntensityData& data) {
    std::ostringstream os;
    os << "x1,x2,k,f\n";
    for (std::size_t ki = 0; ki < data.k_values.size(); ++ki) {
        const double* s = data.slice(ki);
        for (int j = 0; j < data.plane.m2; ++j)
            for (int i = 0; i < data.plane.m1; ++i)
                os << fmt(data.plane.x1(i)) << ',' << fmt(data.plane.x2(j)) << ','
                   << fmt(data.k_values[ki]) << ',' << fmt(s[data.plane.idx(i, j)]) << '\n';
    }
    write_text_file(path, os.str());
}

namespace {

struct CsvTable {
    std::vector<std::vector<double>> rows;
};

CsvTable read_csv(const std::string& path, const std::string& header, std::size_t cols) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(is, line) || line != header)
        throw std::runtime_error("'" + path + "': expected header '" + header + "'");
    CsvTable table;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            std::size_t comma = line.find(',', pos);
            std::string cell = line.substr(pos, comma == std::string::npos ? std::string::npos
                                                                           : comma - pos);
            row.push_back(std::stod(cell));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (row.size() != cols)
            throw std::runtime_error("'" + path + "': malformed row '" + line + "'");
        table.rows.push_back(std::move(row));
    }
    return table;
}

/// Recovers (plane, k list) from rows sorted by (k, x2, x1).
template <class Push>
void parse_plane_rows(const CsvTable& table, const std::string& path, PlaneGrid& plane,
                      std::vector<double>& ks, Push&& push) {
    if (table.rows.empty()) throw std::runtime_error("'" + path + "': no data rows");
    std::vector<double> x1s, x2s;
    double k0 = table.rows[0][2];
    for (const auto& r : table.rows) {
        if (r[2] != k0) break;
        if (r[1] == table.rows[0][1]) x1s.push_back(r[0]);
    }
    for (const auto& r : table.rows) {
        if (r[2] != k0) break;
        if (x2s.empty() || r[1] != x2s.back()) x2s.push_back(r[1]);
    }
    if (x1s.size() < 2 || x2s.size() < 2)
        throw std::runtime_error("'" + path + "': degenerate plane sampling");
    double hw = std::max(std::abs(x1s.front()), std::abs(x1s.back()));
    plane = PlaneGrid(0.0, hw, int(x1s.size()), int(x2s.size()));
    const std::size_t per = plane.size();
    if (table.rows.size() % per != 0)
        throw std::runtime_error("'" + path + "': row count not a multiple of plane size");
    for (std::size_t r = 0; r < table.rows.size(); r += per) ks.push_back(table.rows[r][2]);
    for (const auto& r : table.rows) push(r);
}

}  // namespace

IntensityData read_intensity_csv(const std::string& path) {
    CsvTable table = read_csv(path, "x1,x2,k,f", 4);
    PlaneGrid plane;
    std::vector<double> ks;
    std::vector<double> vals;
    parse_plane_rows(table, path, plane, ks, [&](const std::vector<double>& r) {
        if (r[3] < 0) throw std::runtime_error("'" + path + "': negative intensity");
        vals.push_back(r[3]);
    });
    IntensityData out(plane, ks);
    out.values = std::move(vals);
    return out;
}

void write_plane_csv(const std::string& path, const ComplexPlaneData& data) {
    std::ostringstream os;
    os << "x1,x2,k,re,im\n";
    for (std::size_t ki = 0; ki < data.k_values.size(); ++ki) {
        const cdouble* s = data.slice(ki);
        for (int j = 0; j < data.plane.m2; ++j)
            for (int i = 0; i < data.plane.m1; ++i) {
                cdouble v = s[data.plane.idx(i, j)];
                os << fmt(data.plane.x1(i)) << ',' << fmt(data.plane.x2(j)) << ','
                   << fmt(data.k_values[ki]) << ',' << fmt(v.real()) << ',' << fmt(v.imag())
                   << '\n';
            }
    }
    write_text_file(path, os.str());
}

ComplexPlaneData read_plane_csv(const std::string& path) {
    CsvTable table = read_csv(path, "x1,x2,k,re,im", 5);
    PlaneGrid plane;
    std::vector<double> ks;
    std::vector<cdouble> vals;
    parse_plane_rows(table, path, plane, ks, [&](const std::vector<double>& r) {
        vals.emplace_back(r[3], r[4]);
    });
    ComplexPlaneData out(plane, ks);
    out.values = std::move(vals);
    return out;
}

void export_slice(const std::string& path, const RealField3& field, int axis, int index,
                  SliceFormat format) {
    const Grid3& g = field.grid;
    if (axis < 0 || axis > 2) throw std::invalid_argument("export_slice: axis must be 0..2");
    const int extent = axis == 0 ? g.n1 : (axis == 1 ? g.n2 : g.n3);
    if (index < 0 || index >= extent)
        throw std::out_of_range("export_slice: slice index out of range");
    const int na = axis == 0 ? g.n2 : g.n1;
    const int nb = axis == 2 ? g.n2 : g.n3;
    auto at = [&](int a, int b) {
        if (axis == 0) return field(index, a, b);
        if (axis == 1) return field(a, index, b);
        return field(a, b, index);
    };

    if (format == SliceFormat::csv) {
        std::ostringstream os;
        for (int b = 0; b < nb; ++b) {
            for (int a = 0; a < na; ++a) {
                if (a) os << ',';
                os << fmt(at(a, b));
            }
            os << '\n';
        }
        write_text_file(path, os.str());
        return;
    }

    double lo = at(0, 0), hi = at(0, 0);
    for (int b = 0; b < nb; ++b)
        for (int a = 0; a < na; ++a) {
            lo = std::min(lo, at(a, b));
            hi = std::max(hi, at(a, b));
        }
    const double span = hi > lo ? hi - lo : 1.0;
    std::ostringstream os;
    os << "P5\n" << na << ' ' << nb << "\n65535\n";
    for (int b = 0; b < nb; ++b)
        for (int a = 0; a < na; ++a) {
            unsigned v = unsigned(std::lround((at(a, b) - lo) / span * 65535.0));
            os.put(char((v >> 8) & 0xff));
            os.put(char(v & 0xff));
        }
    write_text_file(path, os.str());
    std::ostringstream side;
    side << "min=" << fmt(lo) << "\nmax=" << fmt(hi) << "\naxis=" << axis
         << "\nindex=" << index << "\n";
    write_text_file(path + ".sidecar.txt", side.str());
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    os.write(text.data(), std::streamsize(text.size()));
    if (!os) throw std::runtime_error("write failed on '" + path + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace psir
