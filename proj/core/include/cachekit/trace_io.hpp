#pragma once

#include <iosfwd>
#include <string>

#include "cachekit/types.hpp"

namespace cachekit {

/// Trace CSV, header `time,object,size,value` (the size/value columns may be
/// absent entirely; defaults are then 1 byte and value 1.0). `size`/`value`
/// may be left empty after an object's first occurrence; a first occurrence
/// with an empty size while the column exists is a schema error.
Trace load_trace(std::istream& in);
Trace load_trace_file(const std::string& path);

void save_trace(const Trace& trace, std::ostream& out);
void save_trace_file(const Trace& trace, const std::string& path);

}  // namespace cachekit
