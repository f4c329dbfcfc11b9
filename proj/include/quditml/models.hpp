// models.hpp — The four classifiers behind one "features -> class
// probabilities" contract: the QAE-qudit VQC, the raw qudit VQC, the
// QAE-assisted qubit VQC, and the bias-free dense NN baseline.

#pragma once

#include "quditml/algebra.hpp"
#include "quditml/rng.hpp"

#include <array>
#include <vector>

namespace quditml {

inline constexpr int kNumClasses = 9;

// ---------------------------------------------------------------------------
// Qudit VQC
// ---------------------------------------------------------------------------

// Layered weights phi of a single-qudit VQC; weight count = layers * (d^2-1).
struct QuditVqcParams {
    int dim = 9;        // qudit dimension d
    RMatrix weights;    // layers x (d^2-1)

    int layers() const { return static_cast<int>(weights.rows()); }
    int latent_dim() const { return static_cast<int>(weights.cols()); }
    int parameter_count() const { return static_cast<int>(weights.size()); }

    static QuditVqcParams random_init(int dim, int layers, double sigma, Rng& rng);
};

// One re-uploading unit U(phi_l, x) = exp(-i Sum_j x_j phi_l^j g_j).
Matrix vqc_unit(const RVector& x, const RVector& phi_l, const GeneratorBasis& basis);

// [x, 1, 1, ..., 1]: raw features in the first slots, the rest reset to unity.
RVector extend_with_unity(const RVector& x, int total);

// Raw-feature unit: exp(-i [Sum_{j<K} x_j phi^j g_j + Sum_{j>=K} phi^j g_j]),
// i.e. vqc_unit with the feature vector extended by unity.
Matrix raw_qudit_unit(const RVector& x, const RVector& phi_l, const GeneratorBasis& basis);

// Applies U(phi_L,x) ... U(phi_1,x) to |0> (layer 1 first) and returns the
// basis probabilities; outcome k is associated with class k.
RVector qudit_vqc_forward(const RVector& x, const QuditVqcParams& params,
                          const GeneratorBasis& basis);

// Same circuit built from raw_qudit_unit layers (x has K entries).
RVector raw_qudit_forward(const RVector& x, const QuditVqcParams& params,
                          const GeneratorBasis& basis);

// ---------------------------------------------------------------------------
// QAE (classical encoder/decoder around a quantum feature map)
// ---------------------------------------------------------------------------

// Bias-free linear encoder K -> D and decoder 2d -> K.
struct QaeParams {
    RMatrix encoder;    // K x D
    RMatrix decoder;    // 2d x K

    int input_dim() const { return static_cast<int>(encoder.rows()); }
    int latent_dim() const { return static_cast<int>(encoder.cols()); }
    int qudit_dim() const { return static_cast<int>(decoder.rows()) / 2; }
    int parameter_count() const {
        return static_cast<int>(encoder.size() + decoder.size());
    }

    static QaeParams random_init(int input_dim, int latent_dim, int qudit_dim,
                                 double sigma, Rng& rng);
};

// x * W_enc; linear, no bias, no activation.
RVector qae_encode(const RVector& x, const QaeParams& params);

// Amplitudes of exp(-i Sum_j chi_j g_j)|0>.
CVector quantum_bottleneck(const RVector& chi, const GeneratorBasis& basis);

// Concatenates (Re, Im) of the amplitudes and applies the decoder.
RVector qae_decode(const CVector& amplitudes, const QaeParams& params);

// Full round trip decode(bottleneck(encode(x))).
RVector qae_reconstruct(const RVector& x, const QaeParams& params,
                        const GeneratorBasis& basis);

// (1/M) Sum_i ||x_i - reconstruct(x_i)||^2 over the rows of `batch`.
double qae_reconstruction_loss(const RMatrix& batch, const QaeParams& params,
                               const GeneratorBasis& basis);

// Classifier composition: the trained encoder feeds the qudit VQC.
RVector qae_qudit_forward(const RVector& x, const QaeParams& qae,
                          const QuditVqcParams& vqc, const GeneratorBasis& basis);

// ---------------------------------------------------------------------------
// Qubit VQC (4 qubits, per-qubit Pauli encoding, CNOT cascade)
// ---------------------------------------------------------------------------

inline constexpr int kQubitRegister = 4;
inline constexpr int kQubitFeatures = 12;   // 3 per qubit

// How 16 register outcomes map onto 9 classes.
enum class QubitReadout {
    FirstNine,    // outcomes 0..8, renormalized
    GroupedTail,  // outcomes 0..7 as classes 0..7; class 8 collects 8..15
};

struct QubitVqcParams {
    RMatrix weights;    // m x 12
    QubitReadout readout = QubitReadout::FirstNine;

    int layers() const { return static_cast<int>(weights.rows()); }
    int parameter_count() const { return static_cast<int>(weights.size()); }

    static QubitVqcParams random_init(int layers, double sigma, Rng& rng);
};

// Per layer: each qubit k applies exp(-i Sum_i x_{3k+i} phi^{3k+i} sigma_i),
// then CNOTs 0->1, 1->2, 2->3; repeated for all layers from |0000>.
RVector qubit_vqc_forward(const RVector& x, const QubitVqcParams& params);

// The shared Pauli basis (sigma_x, sigma_y, sigma_z) used by the qubit layers.
const GeneratorBasis& pauli_basis();

// Fixed CNOT cascade unitary over the 4-qubit register.
const Matrix& cnot_cascade();

// Kronecker product of four per-qubit 2x2 gates (qubit 0 most significant).
Matrix qubit_register_product(const std::array<Matrix, kQubitRegister>& gates);

// ---------------------------------------------------------------------------
// Batched QAE front end for the qubit VQC
// ---------------------------------------------------------------------------

// Four independent per-qubit encoder chains (K -> ... -> 3) and one decoder
// chain (16 -> ... -> K), all layers linear with no bias. Each qubit's three
// latent values drive a single-qubit feature map; the decoder reads the 16
// concatenated per-qubit values (Re a0, Re a1, Im a0, Im a1).
struct BatchedQaeParams {
    std::array<std::vector<RMatrix>, kQubitRegister> encoder_blocks;
    std::vector<RMatrix> decoder;

    int input_dim() const {
        return static_cast<int>(encoder_blocks[0].front().rows());
    }
    int parameter_count() const;

    static BatchedQaeParams random_init(int input_dim,
                                        const std::vector<int>& encoder_hidden,
                                        const std::vector<int>& decoder_hidden,
                                        double sigma, Rng& rng);
};

// Concatenation of the four 3-feature block outputs (length 12).
RVector batched_qae_encode(const RVector& x, const BatchedQaeParams& params);

RVector batched_qae_reconstruct(const RVector& x, const BatchedQaeParams& params);

double batched_qae_loss(const RMatrix& batch, const BatchedQaeParams& params);

// ---------------------------------------------------------------------------
// Dense NN baseline (bias-free, ReLU hidden activations, softmax output)
// ---------------------------------------------------------------------------

struct DenseNnParams {
    std::vector<RMatrix> weights;   // (K x 128), (128 x 256), (256 x 128), (128 x 9)

    int input_dim() const { return static_cast<int>(weights.front().rows()); }
    int parameter_count() const;

    static DenseNnParams random_init(int input_dim, const std::vector<int>& hidden,
                                     int classes, double sigma, Rng& rng);
};

RVector dense_nn_forward(const RVector& x, const DenseNnParams& params);

// Numerically stable softmax.
RVector softmax(const RVector& logits);

} // namespace quditml
