#pragma once

#include <string>

#include "ogs/instance.hpp"

namespace ogs {

// Canonical JSON encodings. Norm and aggregate specs carry a "kind" tag;
// instance jobs are row-major m*r load lists with "inf" for unusable ways.
std::string norm_to_json(const NormSpec& spec);
NormSpec norm_from_json(const std::string& text);
std::string aggregate_to_json(const AggregateSpec& spec);
AggregateSpec aggregate_from_json(const std::string& text);

std::string instance_to_json(const Instance& inst);
Instance instance_from_json(const std::string& text);
std::string set_cover_to_json(const SetCoverInstance& sc);
SetCoverInstance set_cover_from_json(const std::string& text);

void write_file(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace ogs
