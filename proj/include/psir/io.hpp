#pragma once

#include <string>
#include <vector>

#include "psir/grid.hpp"
#include "psir/phantom.hpp"
#include "psir/phase.hpp"
#include "psir/reconstruct.hpp"

namespace psir {

/// Validated run configuration. Defaults reproduce the reference geometry at
/// unit wavenumber scale.
struct ConfigDoc {
    // geometry
    BBox bbox{-3.75, 3.75, -3.75, 3.75, -6.8, 0.7};
    double gamma_z = 0.7;    // data face level (top of the box)
    double plane_z = 49.5;   // measurement plane
    double half_width = 3.75;
    int plane_m1 = 100, plane_m2 = 100;
    // band
    double k_low = 108.3;
    double k_high = 119.7;
    int n_intervals = 10;
    // phantom
    PhantomSpec phantom;     // defaults set in read_config / make_default_config
    // solver
    double ls_tolerance = 1e-6;
    int ls_max_iterations = 500;
    double points_per_wavelength = 10.0;
    double omega_points_per_wavelength = 4.0;  // reconstruction grid density
    std::uint64_t memory_budget = kDefaultMemoryBudget;
    // pipeline
    double noise_level = 0.0;
    std::uint64_t seed = 1;
    double epsilon_p1 = 0.0;  // 0 = automatic
    int inner_iterations = 3;
    double c_max = 6.0;
    double n0 = 1.5;
};

/// Invalid or inconsistent user input (config files, CLI arguments).
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Default configuration: one centered microsphere, reference geometry.
ConfigDoc make_default_config();

/// Parses and validates a JSON config. Unknown keys are rejected; the error
/// message lists every violation found.
ConfigDoc read_config(const std::string& path);
ConfigDoc parse_config(const std::string& json_text);

/// Serializes a config back to JSON (used for the run-summary echo).
std::string config_to_json(const ConfigDoc& config);

/// Binary volume-field container: magic "PSF1", version u32 LE, kind u8
/// (0 real / 1 complex), dims 3xu64 LE, bbox 6xf64 LE, f64 payload
/// (interleaved re/im when complex), x1-fastest.
void write_field(const std::string& path, const RealField3& field);
void write_field(const std::string& path, const ComplexField3& field);

struct LoadedField {
    int kind = 0;  // 0 real, 1 complex
    RealField3 real;
    ComplexField3 complex;
};
LoadedField read_field(const std::string& path);

/// Intensity table: header `x1,x2,k,f`, one row per (node, k), rows sorted by
/// (k, x2, x1), fixed "%.17g" formatting.
void write_intensity_csv(const std::string& path, const IntensityData& data);
IntensityData read_intensity_csv(const std::string& path);

/// Complex plane-field table: header `x1,x2,k,re,im`, same ordering.
void write_plane_csv(const std::string& path, const ComplexPlaneData& data);
ComplexPlaneData read_plane_csv(const std::string& path);

enum class SliceFormat { csv, pgm };

/// Writes one axis-normal slice of a real field as a CSV matrix or a 16-bit
/// PGM (with its min/max scaling recorded in `<path>.sidecar.txt`).
/// axis in {0,1,2}; index along that axis.
void export_slice(const std::string& path, const RealField3& field, int axis, int index,
                  SliceFormat format);

/// Small helpers shared by the CLI.
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace psir
