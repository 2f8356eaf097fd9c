#ifndef EPKIT_EMIT_HPP
#define EPKIT_EMIT_HPP

#include <array>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "epkit/cpoly.hpp"
#include "epkit/trajectory.hpp"

namespace epkit {

/// Resolved run parameters.  The worker count steers execution only and is
/// deliberately excluded from emitted documents so outputs stay byte-stable
/// across schedulers.
struct RunConfig {
    std::string subcommand;
    std::vector<std::pair<std::string, std::string>> params;  // insertion order
    int workers = 1;

    void set(std::string key, std::string value);
    void set(std::string key, double value);
    void set(std::string key, int value);
};

// --- CSV ------------------------------------------------------------------

/// Schema: t,z_re,z_im,zdot_re,zdot_im,energy_residual; 17 significant
/// digits, one row per sample, newline terminated.
void write_trajectory_csv(const Trajectory& traj, std::ostream& os);
void write_trajectory_csv(const Trajectory& traj, const std::string& path);
Trajectory read_trajectory_csv(std::istream& is);
Trajectory read_trajectory_csv_file(const std::string& path);

// --- JSON -----------------------------------------------------------------

/// Order-preserving JSON value with deterministic %.17g number formatting.
class JsonValue {
public:
    JsonValue();                       // null
    JsonValue(double v);               // NOLINT: implicit by design
    JsonValue(int v);
    JsonValue(long v);
    JsonValue(bool v);
    JsonValue(const char* s);
    JsonValue(std::string s);
    JsonValue(cplx z);                 // {"re": ..., "im": ...}

    static JsonValue object();
    static JsonValue array();

    JsonValue& add(const std::string& key, JsonValue v);  // object member
    JsonValue& push(JsonValue v);                          // array element

    std::string dump(int indent = 2) const;

private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

/// Document envelope: tool name/version, the config echo, then the payload.
std::string json_document(const RunConfig& cfg, const std::string& payload_key,
                          JsonValue payload);
void write_text_file(const std::string& path, const std::string& content);

// --- SVG ------------------------------------------------------------------

/// Flat scene: styled polyline paths, circle markers, axis lines.  The
/// viewbox is computed to contain every marker; path points far outside the
/// marker region (escape tails) are clipped by the viewport.
struct SvgScene {
    struct Path {
        std::vector<cplx> points;
        std::string css_class = "trajectory";
    };
    struct Marker {
        cplx at;
        std::string css_class = "turning-point";
    };

    std::string title;
    std::vector<Path> paths;
    std::vector<Marker> markers;
    std::optional<std::array<double, 4>> viewbox;  // x, y, width, height

    void add_trajectory(const Trajectory& traj, const std::string& cls = "trajectory");
    void add_turning_points(const TurningPointSet& tps);
    void write(std::ostream& os) const;
    void write_file(const std::string& path) const;
};

}  // namespace epkit

#endif
