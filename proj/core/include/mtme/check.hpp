#pragma once

namespace mtme::detail {

[[noreturn]] void check_failed(const char* expr, const char* msg, const char* file, int line);

}  // namespace mtme::detail

// Contract check for programming errors. Always on, aborts the process.
#define MTME_CHECK(cond, msg)                                                 \
    do {                                                                      \
        if (!(cond)) {                                                        \
            ::mtme::detail::check_failed(#cond, (msg), __FILE__, __LINE__);   \
        }                                                                     \
    } while (0)
