#pragma once

#include <atomic>
#include <exception>
#include <mutex>

namespace crs::detail {

// Captures the first exception thrown inside an OpenMP loop body; throwing
// across a parallel region would terminate the process. Remaining iterations
// become no-ops once a failure is recorded.
class OmpErrorCollector {
public:
    template <typename F>
    void run(F&& f) noexcept {
        if (failed_.load(std::memory_order_relaxed)) return;
        try {
            f();
        } catch (...) {
            std::lock_guard<std::mutex> lock(mu_);
            if (!err_) err_ = std::current_exception();
            failed_.store(true, std::memory_order_relaxed);
        }
    }

    void rethrow_if_failed() const {
        if (err_) std::rethrow_exception(err_);
    }

private:
    std::mutex mu_;
    std::atomic<bool> failed_{false};
    std::exception_ptr err_;
};

}  // namespace crs::detail
