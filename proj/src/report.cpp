#include "quasifix/report.hpp"

#include <cmath>
#include <cstdint>

namespace quasifix {

std::string input_digest(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = hex[h & 0xf];
        h >>= 4;
    }
    return out;
}

std::string canonical_dump(const nlohmann::json& payload) {
    return payload.dump(2) + "\n";
}

nlohmann::json json_modulus(double q) {
    if (std::isinf(q)) return "inf";
    return q;
}

std::string RunReport::render_json() const {
    if (raw) return text;
    nlohmann::json root;
    root["command"] = command;
    root["input"] = {{"path", input_path}, {"digest", digest}};
    root["payload"] = payload;
    root["tool"] = std::string(kToolVersion);
    return canonical_dump(root);
}

}  // namespace quasifix
