#pragma once

#include <stdexcept>
#include <string>

namespace verbtrack {

// Every failure surfaced by the library derives from Error so callers can
// catch the whole family or individual conditions.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- input / format ---
struct ParseError : Error { using Error::Error; };        // malformed line or document
struct SchemaError : Error { using Error::Error; };       // missing/ill-typed field, bad value
struct IndexError : Error { using Error::Error; };        // frame index outside the video
struct OutOfRange : Error { using Error::Error; };        // projection depth/extent violations

// --- tracking ---
struct MissingThreshold : Error { using Error::Error; };  // box references a source with no metadata
struct NoObjectPresent : Error { using Error::Error; };   // no frame clears the subinterval threshold
struct EmptyFrame : Error { using Error::Error; };        // a frame in the interval has no candidates
struct EmptyRegion : Error { using Error::Error; };       // box covers no pixels
struct SizeExceeded : Error { using Error::Error; };      // oracle input larger than its brute-force cap

// --- features / series ---
struct TooShort : Error { using Error::Error; };          // track below the minimum feature length
struct NoTracks : Error { using Error::Error; };          // video produced no tracks at all
struct NoOverlap : Error { using Error::Error; };         // role pair shares too few frames
struct SchemaMismatch : Error { using Error::Error; };    // series schema differs from the model's
struct EmptySeries : Error { using Error::Error; };       // zero-frame series
struct EmptyBank : Error { using Error::Error; };         // exemplar bank with no entries
struct DegenerateInput : Error { using Error::Error; };   // unusable training set
struct NoExemplars : Error { using Error::Error; };       // verb with no usable training videos

} // namespace verbtrack
