#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

namespace quasifix {

inline constexpr std::string_view kToolVersion = "quasifix 0.1.0";

/// FNV-1a 64-bit digest of the raw input bytes, as 16 hex characters.
/// A reproducibility fingerprint for reports, not a cryptographic hash.
std::string input_digest(std::string_view bytes);

/// Canonical machine rendering: keys sorted, two-space indent,
/// round-trip-exact numbers, trailing newline. Identical payloads produce
/// byte-identical output.
std::string canonical_dump(const nlohmann::json& payload);

/// JSON value for a modulus: plain number when finite, the string "inf"
/// otherwise (JSON has no infinity literal).
nlohmann::json json_modulus(double q);

/// Report wrapper shared by all commands: tool version, input fingerprint,
/// and the per-command payload, renderable both ways.
struct RunReport {
    std::string command;
    std::string input_path;  // "-" when the command takes no file
    std::string digest;
    nlohmann::json payload;
    std::string text;   // human rendering, built by the command
    bool raw = false;   // when set, both renderings are `text` verbatim (gen)

    std::string render_json() const;
    const std::string& render_text() const { return text; }
};

}  // namespace quasifix
