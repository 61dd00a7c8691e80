#pragma once

#include <chrono>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace cfm {

// All operational failures carry a short machine-readable code plus a
// human-readable message. Internal logic errors use assertions instead.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

inline double dist(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

// Wall-clock phase timings accumulated over a pipeline run, keyed by phase
// name ("integration", "factorization", "conjugate_construction", "solve",
// "estimation"). Seconds.
struct Timings {
    std::map<std::string, double> seconds;

    void add(const std::string& phase, double s) { seconds[phase] += s; }
    double get(const std::string& phase) const {
        auto it = seconds.find(phase);
        return it == seconds.end() ? 0.0 : it->second;
    }
    void merge(const Timings& o) {
        for (const auto& [k, v] : o.seconds) seconds[k] += v;
    }
};

class ScopedTimer {
public:
    ScopedTimer(Timings& t, std::string phase)
        : timings_(t), phase_(std::move(phase)),
          start_(std::chrono::steady_clock::now()) {}
    ~ScopedTimer() {
        auto end = std::chrono::steady_clock::now();
        timings_.add(phase_, std::chrono::duration<double>(end - start_).count());
    }

private:
    Timings& timings_;
    std::string phase_;
    std::chrono::steady_clock::time_point start_;
};

// Portable uniform double in [0,1) from a raw 64-bit draw. Used instead of
// std::uniform_real_distribution so that seeded geometry is identical across
// standard library implementations.
inline double unit_double(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace cfm
