#include "ultraslow/types.hpp"

#include <cmath>
#include <sstream>

namespace ultraslow {

void SeriesConfig::validate() const {
    if (max_terms < 1) throw DomainError("SeriesConfig: max_terms must be >= 1");
    if (!(abs_tol > 0) || !(rel_tol > 0)) throw DomainError("SeriesConfig: tolerances must be > 0");
}

void IltConfig::validate() const {
    if (gs_terms < 4 || gs_terms % 2 != 0)
        throw DomainError("IltConfig: gs_terms must be even and >= 4");
    if (talbot_nodes < 4) throw DomainError("IltConfig: talbot_nodes must be >= 4");
    if (!(tol > 0)) throw DomainError("IltConfig: tol must be > 0");
}

void PrabhakarParams::validate() const {
    if (!(alpha > 0)) throw DomainError("PrabhakarParams: alpha must be > 0");
    if (!std::isfinite(beta) || !std::isfinite(gamma) || !std::isfinite(lambda))
        throw DomainError("PrabhakarParams: non-finite parameter");
}

MemoryKernel MemoryKernel::caputo(real mu, real B) {
    MemoryKernel k;
    k.kind = KernelKind::SingleCaputo;
    k.mu = mu;
    k.B = B;
    k.validate();
    return k;
}

MemoryKernel MemoryKernel::prabhakar(real alpha, real mu, real gamma, real lambda, real B) {
    MemoryKernel k;
    k.kind = KernelKind::SinglePrabhakar;
    k.alpha = alpha;
    k.mu = mu;
    k.gamma = gamma;
    k.lambda = lambda;
    k.B = B;
    k.validate();
    return k;
}

MemoryKernel MemoryKernel::distributed(real B) {
    MemoryKernel k;
    k.kind = KernelKind::DistributedOrder;
    k.B = B;
    k.validate();
    return k;
}

MemoryKernel MemoryKernel::distributed_prabhakar(real alpha, real gamma, real lambda, real B) {
    MemoryKernel k;
    k.kind = KernelKind::DistributedPrabhakar;
    k.alpha = alpha;
    k.gamma = gamma;
    k.lambda = lambda;
    k.B = B;
    k.validate();
    return k;
}

void MemoryKernel::validate() const {
    if (!(B > 0)) throw DomainError("MemoryKernel: B must be > 0");
    auto open_unit = [](real v) { return v > 0 && v < 1; };
    switch (kind) {
    case KernelKind::SingleCaputo:
        if (!open_unit(mu)) throw DomainError("MemoryKernel: mu must lie in (0,1)");
        break;
    case KernelKind::SinglePrabhakar:
        if (!open_unit(mu)) throw DomainError("MemoryKernel: mu must lie in (0,1)");
        [[fallthrough]];
    case KernelKind::DistributedPrabhakar:
        if (!open_unit(alpha) || !open_unit(gamma))
            throw DomainError("MemoryKernel: alpha and gamma must lie in (0,1)");
        if (!(lambda >= 0)) throw DomainError("MemoryKernel: lambda must be >= 0");
        break;
    case KernelKind::DistributedOrder:
        break;
    }
}

std::string MemoryKernel::name() const {
    std::ostringstream os;
    switch (kind) {
    case KernelKind::SingleCaputo: os << "caputo(mu=" << double(mu) << ")"; break;
    case KernelKind::SinglePrabhakar:
        os << "prabhakar(alpha=" << double(alpha) << ",mu=" << double(mu) << ",gamma=" << double(gamma)
           << ",lambda=" << double(lambda) << ")";
        break;
    case KernelKind::DistributedOrder: os << "k1"; break;
    case KernelKind::DistributedPrabhakar:
        os << "k2(alpha=" << double(alpha) << ",gamma=" << double(gamma) << ",lambda=" << double(lambda) << ")";
        break;
    }
    return os.str();
}

}  // namespace ultraslow
