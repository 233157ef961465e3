#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "relcon/linalg.hpp"

namespace relcon {

// Per-component sector slopes: (phi(s) - sigma1 s)(phi(s) - sigma2 s) <= 0.
class SectorBounds {
public:
    SectorBounds() = default;
    SectorBounds(std::vector<double> sigma1, std::vector<double> sigma2);

    static SectorBounds scalar(int n, double sigma1, double sigma2);

    [[nodiscard]] int dimension() const { return static_cast<int>(sigma1_.size()); }
    [[nodiscard]] const std::vector<double>& sigma1() const { return sigma1_; }
    [[nodiscard]] const std::vector<double>& sigma2() const { return sigma2_; }
    [[nodiscard]] Matrix Sigma1() const;
    [[nodiscard]] Matrix Sigma2() const;
    // True when Sigma1 = s1 I and Sigma2 = s2 I.
    [[nodiscard]] bool is_scalar() const;

private:
    std::vector<double> sigma1_;
    std::vector<double> sigma2_;
};

enum class ChannelKind { Identity, Saturation, StaticGain, Table };

const char* to_string(ChannelKind kind);

// A static scalar map applied to one component of one edge signal.
class SectorChannel {
public:
    static SectorChannel identity();
    static SectorChannel saturation(double limit);
    static SectorChannel static_gain(double gain);
    // Piecewise-linear map through the given knots; (0, 0) is inserted when
    // missing and the end segments are extended linearly.
    static SectorChannel table(std::vector<std::pair<double, double>> knots);

    [[nodiscard]] double operator()(double z) const;
    [[nodiscard]] ChannelKind kind() const { return kind_; }
    [[nodiscard]] double limit() const { return param_; }
    [[nodiscard]] double gain() const { return param_; }
    [[nodiscard]] const std::vector<std::pair<double, double>>& knots() const { return knots_; }

private:
    ChannelKind kind_ = ChannelKind::Identity;
    double param_ = 0.0;
    std::vector<std::pair<double, double>> knots_;
};

// M*n channels, index j*n + k for edge j and component k.
struct ChannelBank {
    std::vector<SectorChannel> channels;
    int components = 1;

    [[nodiscard]] int size() const { return static_cast<int>(channels.size()); }

    static ChannelBank uniform(int edges, int components, const SectorChannel& channel);
    // One gain per component, shared by every edge.
    static ChannelBank component_gains(int edges, const std::vector<double>& gains);
    // Independent gains drawn uniformly from [lo, hi] per channel.
    static ChannelBank random_gains(int edges, int components, double lo, double hi,
                                    std::uint64_t seed);
};

Vector apply(const ChannelBank& bank, const Vector& z);

struct SectorCheck {
    bool pass = true;
    double worst_product = 0.0;
    double worst_z = 0.0;
};

// Evaluates the sector product on `points` uniform probes over [-range, range]
// plus z = 0; passes when every product is <= 1e-12.
SectorCheck sector_certificate(const SectorChannel& channel, double sigma1, double sigma2,
                               double range, int points = 2001);

}  // namespace relcon
