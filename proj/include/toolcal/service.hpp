#pragma once

#include "toolcal/shaping.hpp"
#include "toolcal/types.hpp"

#include <iosfwd>

namespace toolcal {

// Newline-delimited JSON scoring service. Requests:
//   {"id": ..., "kind": "score"|"judge", "raw_text": ..., "reference_calls": [...],
//    "schemas": [...], "query"?, "hardness"?, "band"?, "step"?}
// Every request line produces exactly one response line; malformed requests
// yield an error response echoing the id when one was recoverable.
class RewardService {
  public:
    explicit RewardService(ShapingConfig cfg = default_shaping_config(),
                           std::vector<ToolSchema> default_schemas = {});

    const ShapingConfig & config() const { return cfg_; }

    json handle_request(const json & request) const;
    std::string handle_line(const std::string & line) const;

  private:
    ShapingConfig cfg_;
    SchemaMap default_schemas_;
};

// Pumps requests from `in` to `out` until end-of-input or a termination
// signal. Returns the number of responses written.
std::size_t serve_stream(const RewardService & service, std::istream & in, std::ostream & out);

// Plain TCP stream socket accepting one client at a time; each connection
// speaks the same line protocol. Runs until a termination signal.
void serve_socket(const RewardService & service, int port);

}  // namespace toolcal
