#pragma once

#include <string>

#include "sfdel/sampling.hpp"

namespace sfdel {

// CSV exchange format for samples: header x,y,...,z (coordinate columns named
// x, y, z, x4, x5, ... followed by value column z), comma separated, '.'
// decimal point, LF line endings, shortest round-trip number formatting.
// A sidecar JSON ("<path>.meta.json") carries lambda and the prototype
// region.  Reading without a sidecar infers lambda as the smallest scale
// whose unit prototype region encloses all sites (flagged on the sample).
void write_sites_csv(const SiteSample& sample, const std::string& path);

SiteSample read_sites_csv(const std::string& path);

}  // namespace sfdel
