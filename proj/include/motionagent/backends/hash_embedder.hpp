#pragma once

#include "motionagent/backends/backend.hpp"

#include <vector>

namespace motionagent::backends {

/// Deterministic text embedder: every token is hashed (with the seed) into a
/// pseudo-random direction, directions are summed and the result is
/// L2-normalized. Texts sharing tokens land close together.
///
/// Serves schema tag "embed" with payload {"text": ...}; the vector is
/// returned in fields["embedding"].
class HashProjectionEmbedder final : public Backend {
public:
    HashProjectionEmbedder(std::string model_id, size_t dimension, std::uint64_t seed);

    ModelResponse invoke(const ModelRequest& request) override;

    std::vector<double> embed(std::string_view text) const;
    size_t dimension() const noexcept { return dimension_; }

private:
    size_t dimension_;
    std::uint64_t seed_;
};

/// Calls any Embedder backend and extracts fields["embedding"].
/// MalformedResponse when the field is missing or not numeric.
std::vector<double> embed_text(Backend& embedder, const std::string& text);

} // namespace motionagent::backends
