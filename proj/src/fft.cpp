#include "conical/fft.hpp"

#include <fftw3.h>

#include <cassert>
#include <map>
#include <mutex>

namespace conical {

namespace {

// FFTW planning is not thread safe; execution on distinct arrays is. Plans
// are cached per (size, direction) and created under a lock, with
// FFTW_UNALIGNED so they can run on any caller buffer.
class PlanCache {
  public:
    static PlanCache& instance() {
        static PlanCache c;
        return c;
    }

    fftw_plan get(std::size_t n, int sign) {
        std::lock_guard<std::mutex> lock(mu_);
        const auto key = std::make_pair(n, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::vector<cplx> probe(n);
        fftw_plan p = fftw_plan_dft_1d(int(n), reinterpret_cast<fftw_complex*>(probe.data()),
                                       reinterpret_cast<fftw_complex*>(probe.data()), sign,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, p);
        return p;
    }

  private:
    std::mutex mu_;
    std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

void run_1d(std::vector<cplx>& data, int sign) {
    fftw_plan p = PlanCache::instance().get(data.size(), sign);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(data.data()),
                     reinterpret_cast<fftw_complex*>(data.data()));
}

}  // namespace

bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

void fft_forward(std::vector<cplx>& data) { run_1d(data, FFTW_FORWARD); }

void fft_inverse(std::vector<cplx>& data) { run_1d(data, FFTW_BACKWARD); }

void fft_forward_axis(std::vector<cplx>& data, std::size_t n0, std::size_t n1, int axis) {
    assert(data.size() == n0 * n1);
    std::vector<cplx> line;
    if (axis == 1) {
        line.resize(n1);
        for (std::size_t i = 0; i < n0; ++i) {
            std::copy(data.begin() + i * n1, data.begin() + (i + 1) * n1, line.begin());
            run_1d(line, FFTW_FORWARD);
            std::copy(line.begin(), line.end(), data.begin() + i * n1);
        }
    } else {
        line.resize(n0);
        for (std::size_t j = 0; j < n1; ++j) {
            for (std::size_t i = 0; i < n0; ++i) line[i] = data[i * n1 + j];
            run_1d(line, FFTW_FORWARD);
            for (std::size_t i = 0; i < n0; ++i) data[i * n1 + j] = line[i];
        }
    }
}

void fft_inverse_axis(std::vector<cplx>& data, std::size_t n0, std::size_t n1, int axis) {
    assert(data.size() == n0 * n1);
    std::vector<cplx> line;
    if (axis == 1) {
        line.resize(n1);
        for (std::size_t i = 0; i < n0; ++i) {
            std::copy(data.begin() + i * n1, data.begin() + (i + 1) * n1, line.begin());
            run_1d(line, FFTW_BACKWARD);
            std::copy(line.begin(), line.end(), data.begin() + i * n1);
        }
    } else {
        line.resize(n0);
        for (std::size_t j = 0; j < n1; ++j) {
            for (std::size_t i = 0; i < n0; ++i) line[i] = data[i * n1 + j];
            run_1d(line, FFTW_BACKWARD);
            for (std::size_t i = 0; i < n0; ++i) data[i * n1 + j] = line[i];
        }
    }
}

long fft_signed_index(std::size_t k, std::size_t n) {
    return (k < n / 2) ? long(k) : long(k) - long(n);
}

double fft_wavenumber(std::size_t k, std::size_t n, double len) {
    return 2.0 * M_PI * double(fft_signed_index(k, n)) / len;
}

}  // namespace conical
