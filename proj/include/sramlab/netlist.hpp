#pragma once

// Circuit representation and the SPICE-subset netlist reader/writer.
//
// Grammar (case-insensitive, canonicalized to lower case):
//   M<name> <d> <g> <s> <b> <model> W=<num> L=<num>
//   V<name> <n+> <n-> <volts>
//   R<name> <n+> <n-> <ohms>
//   .model <name> <NMOS|PMOS> (<key>=<num> ...)
//   .end
// '*' starts a comment line, '+' continues the previous card.

#include "sramlab/device.hpp"
#include "sramlab/error.hpp"

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace sramlab {

inline constexpr const char* kGround = "0";

struct MosfetInstance {
    std::string name;
    std::string drain;
    std::string gate;
    std::string source;
    std::string bulk;
    std::string model;
    double w = 0.0;  // m
    double l = 0.0;  // m

    bool operator==(const MosfetInstance&) const = default;
};

struct VoltageSource {
    std::string name;
    std::string pos;
    std::string neg;
    double volts = 0.0;

    bool operator==(const VoltageSource&) const = default;
};

struct Resistor {
    std::string name;
    std::string pos;
    std::string neg;
    double ohms = 0.0;

    bool operator==(const Resistor&) const = default;
};

/// A flat netlist. Nets are declared implicitly by the terminals that use
/// them; ground ("0") always exists.
struct Circuit {
    std::vector<MosfetInstance> mosfets;
    std::vector<VoltageSource> vsources;
    std::vector<Resistor> resistors;
    std::map<std::string, DeviceParams> models;

    [[nodiscard]] std::set<std::string> nets() const;
    [[nodiscard]] bool has_net(std::string_view net) const;

    [[nodiscard]] const VoltageSource* find_source(std::string_view name) const;
    [[nodiscard]] VoltageSource* find_source(std::string_view name);
    [[nodiscard]] const MosfetInstance* find_mosfet(std::string_view name) const;

    /// Throws CircuitError when an invariant is broken (duplicate names,
    /// missing model card, non-positive geometry or resistance).
    void validate() const;

    [[nodiscard]] std::size_t element_count() const {
        return mosfets.size() + vsources.size() + resistors.size();
    }
};

/// Equality up to instance ordering.
[[nodiscard]] bool equivalent(const Circuit& a, const Circuit& b);

/// Parse a numeric literal with an optional SPICE scale suffix
/// (f p n u m k meg). Throws std::invalid_argument on malformed input.
[[nodiscard]] double parse_number(std::string_view text);

[[nodiscard]] Circuit parse_netlist(std::string_view text);
[[nodiscard]] std::string serialize_netlist(const Circuit& circuit);

/// Shortest round-tripping scientific form, e.g. "1e+03", "9e-08".
[[nodiscard]] std::string format_number(double value);

}  // namespace sramlab
