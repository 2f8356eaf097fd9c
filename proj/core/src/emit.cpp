#include "epkit/emit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "epkit/version.hpp"

namespace epkit {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string escape_json(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 8);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

}  // namespace

void RunConfig::set(std::string key, std::string value) {
    params.emplace_back(std::move(key), std::move(value));
}
void RunConfig::set(std::string key, double value) {
    params.emplace_back(std::move(key), fmt17(value));
}
void RunConfig::set(std::string key, int value) {
    params.emplace_back(std::move(key), std::to_string(value));
}

// --- CSV --------------------------------------------------------------------

void write_trajectory_csv(const Trajectory& traj, std::ostream& os) {
    if (traj.samples.empty()) throw std::invalid_argument("empty trajectory");
    os << "t,z_re,z_im,zdot_re,zdot_im,energy_residual\n";
    for (const auto& s : traj.samples) {
        os << fmt17(s.t) << ',' << fmt17(s.z.real()) << ',' << fmt17(s.z.imag()) << ','
           << fmt17(s.zdot.real()) << ',' << fmt17(s.zdot.imag()) << ','
           << fmt17(s.energy_residual) << '\n';
    }
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    write_trajectory_csv(traj, os);
}

Trajectory read_trajectory_csv(std::istream& is) {
    Trajectory traj;
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("empty csv");
    if (line.rfind("t,z_re", 0) != 0) throw std::runtime_error("unexpected csv header");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        double v[6];
        const char* p = line.c_str();
        char* end = nullptr;
        for (int k = 0; k < 6; ++k) {
            v[k] = std::strtod(p, &end);
            if (p == end) throw std::runtime_error("bad csv row: " + line);
            p = (*end == ',') ? end + 1 : end;
        }
        traj.samples.push_back({v[0], cplx(v[1], v[2]), cplx(v[3], v[4]), v[5]});
    }
    return traj;
}

Trajectory read_trajectory_csv_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + path);
    return read_trajectory_csv(is);
}

// --- JSON -------------------------------------------------------------------

struct JsonValue::Impl {
    enum Kind { Null, Num, Str, Bool, Arr, Obj } kind = Null;
    double num = 0.0;
    bool bol = false;
    std::string str;
    std::vector<JsonValue> arr;
    std::vector<std::pair<std::string, JsonValue>> obj;

    void dump(std::string& out, int indent, int depth) const {
        std::string pad(static_cast<std::size_t>(indent) * depth, ' ');
        std::string pad1(static_cast<std::size_t>(indent) * (depth + 1), ' ');
        switch (kind) {
            case Null: out += "null"; return;
            case Num: out += fmt17(num); return;
            case Bool: out += bol ? "true" : "false"; return;
            case Str:
                out += '"';
                out += escape_json(str);
                out += '"';
                return;
            case Arr: {
                if (arr.empty()) { out += "[]"; return; }
                out += "[\n";
                for (std::size_t i = 0; i < arr.size(); ++i) {
                    out += pad1;
                    arr[i].impl_->dump(out, indent, depth + 1);
                    if (i + 1 < arr.size()) out += ',';
                    out += '\n';
                }
                out += pad;
                out += ']';
                return;
            }
            case Obj: {
                if (obj.empty()) { out += "{}"; return; }
                out += "{\n";
                for (std::size_t i = 0; i < obj.size(); ++i) {
                    out += pad1;
                    out += '"';
                    out += escape_json(obj[i].first);
                    out += "\": ";
                    obj[i].second.impl_->dump(out, indent, depth + 1);
                    if (i + 1 < obj.size()) out += ',';
                    out += '\n';
                }
                out += pad;
                out += '}';
                return;
            }
        }
    }
};

JsonValue::JsonValue() : impl_(std::make_shared<Impl>()) {}
JsonValue::JsonValue(double v) : impl_(std::make_shared<Impl>()) {
    impl_->kind = Impl::Num;
    impl_->num = v;
}
JsonValue::JsonValue(int v) : JsonValue(double(v)) {}
JsonValue::JsonValue(long v) : JsonValue(double(v)) {}
JsonValue::JsonValue(bool v) : impl_(std::make_shared<Impl>()) {
    impl_->kind = Impl::Bool;
    impl_->bol = v;
}
JsonValue::JsonValue(const char* s) : JsonValue(std::string(s)) {}
JsonValue::JsonValue(std::string s) : impl_(std::make_shared<Impl>()) {
    impl_->kind = Impl::Str;
    impl_->str = std::move(s);
}
JsonValue::JsonValue(cplx z) : impl_(std::make_shared<Impl>()) {
    impl_->kind = Impl::Obj;
    impl_->obj.emplace_back("re", JsonValue(z.real()));
    impl_->obj.emplace_back("im", JsonValue(z.imag()));
}

JsonValue JsonValue::object() {
    JsonValue v;
    v.impl_->kind = Impl::Obj;
    return v;
}
JsonValue JsonValue::array() {
    JsonValue v;
    v.impl_->kind = Impl::Arr;
    return v;
}

JsonValue& JsonValue::add(const std::string& key, JsonValue v) {
    if (impl_->kind != Impl::Obj) throw std::logic_error("add() on non-object");
    impl_->obj.emplace_back(key, std::move(v));
    return *this;
}

JsonValue& JsonValue::push(JsonValue v) {
    if (impl_->kind != Impl::Arr) throw std::logic_error("push() on non-array");
    impl_->arr.push_back(std::move(v));
    return *this;
}

std::string JsonValue::dump(int indent) const {
    std::string out;
    impl_->dump(out, indent, 0);
    return out;
}

std::string json_document(const RunConfig& cfg, const std::string& payload_key,
                          JsonValue payload) {
    JsonValue doc = JsonValue::object();
    doc.add("tool", "epkit");
    doc.add("version", kVersion);
    JsonValue conf = JsonValue::object();
    conf.add("subcommand", cfg.subcommand);
    for (const auto& [k, v] : cfg.params) conf.add(k, v);
    doc.add("config", std::move(conf));
    doc.add(payload_key, std::move(payload));
    return doc.dump() + "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << content;
}

// --- SVG --------------------------------------------------------------------

void SvgScene::add_trajectory(const Trajectory& traj, const std::string& cls) {
    Path p;
    p.css_class = cls;
    p.points.reserve(traj.samples.size());
    for (const auto& s : traj.samples) p.points.push_back(s.z);
    paths.push_back(std::move(p));
}

void SvgScene::add_turning_points(const TurningPointSet& tps) {
    for (cplx z : tps.points) markers.push_back({z, "turning-point"});
}

void SvgScene::write(std::ostream& os) const {
    // data bounds: all markers, plus path points near the marker region
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    auto grow = [&](cplx z) {
        x0 = std::min(x0, z.real());
        x1 = std::max(x1, z.real());
        y0 = std::min(y0, z.imag());
        y1 = std::max(y1, z.imag());
    };
    if (viewbox) {
        x0 = (*viewbox)[0];
        y0 = (*viewbox)[1];
        x1 = x0 + (*viewbox)[2];
        y1 = y0 + (*viewbox)[3];
    } else {
        for (const Marker& m : markers) grow(m.at);
        if (markers.empty())
            for (const Path& p : paths)
                for (cplx z : p.points) grow(z);
        if (!(x1 > x0)) { x0 -= 1.0; x1 += 1.0; }
        if (!(y1 > y0)) { y0 -= 1.0; y1 += 1.0; }
        double diag = std::hypot(x1 - x0, y1 - y0);
        double cap = 2.0 * diag + 1.0;
        double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
        for (const Path& p : paths)
            for (cplx z : p.points)
                if (std::hypot(z.real() - cx, z.imag() - cy) <= cap) grow(z);
        double pad = 0.08 * std::max(x1 - x0, y1 - y0) + 0.2;
        x0 -= pad;
        x1 += pad;
        y0 -= pad;
        y1 += pad;
    }

    const double W = 720.0;
    const double H = W * (y1 - y0) / (x1 - x0);
    auto X = [&](double x) { return (x - x0) / (x1 - x0) * W; };
    auto Y = [&](double y) { return (y1 - y) / (y1 - y0) * H; };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt6(W) << "\" height=\""
       << fmt6(H) << "\" viewBox=\"0 0 " << fmt6(W) << " " << fmt6(H) << "\">\n";
    if (!title.empty()) os << "  <title>" << title << "</title>\n";
    os << "  <style>\n"
          "    .axis { stroke: #999; stroke-width: 1; }\n"
          "    .trajectory { stroke: #1f4e9c; stroke-width: 1.6; fill: none; }\n"
          "    .family { stroke: #7098d4; stroke-width: 1.1; fill: none; }\n"
          "    .turning-point { fill: #c23b22; stroke: none; }\n"
          "    text { font: 12px sans-serif; fill: #444; }\n"
          "  </style>\n";

    // axes through the origin when visible
    if (x0 < 0.0 && x1 > 0.0)
        os << "  <line class=\"axis\" x1=\"" << fmt6(X(0)) << "\" y1=\"0\" x2=\""
           << fmt6(X(0)) << "\" y2=\"" << fmt6(H) << "\"/>\n";
    if (y0 < 0.0 && y1 > 0.0)
        os << "  <line class=\"axis\" x1=\"0\" y1=\"" << fmt6(Y(0)) << "\" x2=\""
           << fmt6(W) << "\" y2=\"" << fmt6(Y(0)) << "\"/>\n";

    for (const Path& p : paths) {
        if (p.points.size() < 2) continue;
        os << "  <polyline class=\"" << p.css_class << "\" points=\"";
        // clamp points into a finite frame slightly larger than the viewport
        for (std::size_t i = 0; i < p.points.size(); ++i) {
            double px = std::clamp(X(p.points[i].real()), -4.0 * W, 5.0 * W);
            double py = std::clamp(Y(p.points[i].imag()), -4.0 * H, 5.0 * H);
            os << (i ? " " : "") << fmt6(px) << ',' << fmt6(py);
        }
        os << "\"/>\n";
    }
    const double r = 0.006 * W;
    for (const Marker& m : markers)
        os << "  <circle class=\"" << m.css_class << "\" cx=\"" << fmt6(X(m.at.real()))
           << "\" cy=\"" << fmt6(Y(m.at.imag())) << "\" r=\"" << fmt6(r) << "\"/>\n";
    os << "  <text x=\"8\" y=\"16\">Re z</text>\n";
    os << "  <text x=\"8\" y=\"32\">Im z up</text>\n";
    os << "</svg>\n";
}

void SvgScene::write_file(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    write(os);
}

}  // namespace epkit
