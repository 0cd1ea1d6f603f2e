#include "tunnel/fft.hpp"

#include "tunnel/errors.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace tunnel::fft {

namespace {

struct PlanCache {
    std::mutex mutex;
    std::map<std::pair<int, int>, fftw_plan> plans;

    ~PlanCache() {
        for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
    }
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

// Plans are made out of place on scratch buffers with FFTW_UNALIGNED so the
// new-array execute interface may be used on any caller memory.
fftw_plan plan_for(int n, int sign) {
    auto& c = cache();
    std::lock_guard lock(c.mutex);
    auto it = c.plans.find({n, sign});
    if (it != c.plans.end()) return it->second;
    std::vector<cd> a(n), b(n);
    fftw_plan p = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(a.data()),
                                   reinterpret_cast<fftw_complex*>(b.data()), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_PRESERVE_INPUT);
    if (!p) throw NumericError("fftw could not create a plan of length " + std::to_string(n), 0.0);
    c.plans.emplace(std::pair{n, sign}, p);
    return p;
}

void run(std::span<const cd> in, std::span<cd> out, int sign) {
    if (in.size() != out.size()) throw ShapeError("fft input and output lengths differ");
    const int n = static_cast<int>(in.size());
    if (n == 0) return;
    fftw_plan p = plan_for(n, sign);
    // an out-of-place plan must not see aliased buffers
    if (static_cast<const void*>(in.data()) == static_cast<const void*>(out.data())) {
        std::vector<cd> tmp(in.begin(), in.end());
        fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(tmp.data()),
                         reinterpret_cast<fftw_complex*>(out.data()));
        return;
    }
    // FFTW takes non-const input even though out-of-place plans leave it intact
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<cd*>(in.data())),
                     reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace

void forward(std::span<const cd> in, std::span<cd> out) { run(in, out, FFTW_FORWARD); }

void backward(std::span<const cd> in, std::span<cd> out) { run(in, out, FFTW_BACKWARD); }

}  // namespace tunnel::fft
