#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "uigym/checker.hpp"
#include "uigym/domain.hpp"
#include "uigym/image.hpp"

namespace uigym {

struct SessionConfig {
  int viewport_width = 1280;
  int viewport_height = 720;
  int navigation_timeout_ms = 10000;
  int settle_delay_ms = 300;
  std::string executable;  // browser binary for external backends
  std::uint64_t rng_seed = 1;

  void validate() const;  // throws ValidationError on nonpositive viewport
};

struct Observation {
  Image screenshot;  // exactly viewport-sized
  int step_index = 0;
  std::int64_t timestamp_ms = 0;
};

enum class ScrollDirection { Up, Down, Left, Right };

const char* to_string(ScrollDirection direction);
ScrollDirection scroll_direction_from_string(const std::string& text);

// Low-level input primitives. Coordinates are viewport pixels.
struct ClickPrimitive { int x = 0, y = 0; };
struct DoubleClickPrimitive { int x = 0, y = 0; };
struct RightClickPrimitive { int x = 0, y = 0; };
struct DragPrimitive { int x1 = 0, y1 = 0, x2 = 0, y2 = 0; };
struct KeyChordPrimitive { std::vector<std::string> keys; };  // 1..3 lowercase names
struct TypeTextPrimitive { std::string text; };  // trailing '\n' presses Enter
struct ScrollPrimitive { int x = 0, y = 0; ScrollDirection direction = ScrollDirection::Down; };

using InputPrimitive = std::variant<ClickPrimitive, DoubleClickPrimitive,
                                    RightClickPrimitive, DragPrimitive,
                                    KeyChordPrimitive, TypeTextPrimitive,
                                    ScrollPrimitive>;

/// One live page session. Operations on a closed handle throw BrowserError.
/// A handle must be driven by one thread at a time (exclusive access);
/// distinct handles are independent.
class PageHandle {
 public:
  virtual ~PageHandle() = default;

  virtual void load_environment(const EnvironmentVersion& env) = 0;
  virtual Observation capture(int step_index = 0) = 0;
  virtual void inject(const InputPrimitive& primitive) = 0;
  virtual nlohmann::json eval_expression(const std::string& script) = 0;

  /// Waits the configured settle delay (virtual time on the embedded
  /// backend), letting pending timers and transitions run.
  virtual void settle() = 0;
  /// The CUA `wait()` action: sleep 5 s.
  virtual void wait_five_seconds() = 0;

  /// Checker access against the current DOM.
  virtual PageProbe& probe() = 0;

  virtual bool alive() const = 0;
  virtual void close() = 0;
};

class Browser {
 public:
  virtual ~Browser() = default;
  virtual std::unique_ptr<PageHandle> open_session(const SessionConfig& config) = 0;
  virtual std::string backend_name() const = 0;
};

/// In-process deterministic engine: HTML/CSS/layout plus a real JS runtime,
/// virtual clock, seeded RNG. The default backend; needs no external binary.
std::unique_ptr<Browser> make_embedded_browser();

/// DevTools-protocol client driving an external Chromium-family binary over
/// --remote-debugging-pipe.
std::unique_ptr<Browser> make_cdp_browser();

}  // namespace uigym
