#include "qdsl/stdlib/prelude.hpp"

namespace qdsl::stdlib {

namespace {

const char* const kCore = R"qds(namespace Microsoft.Quantum.Core {

    function RangeReverse (range : Range) : Range {
        body intrinsic
    }

    function ArrayReverse<`T> (array : `T[]) : `T[] {
        body intrinsic
    }
}
)qds";

const char* const kPrimitive = R"qds(namespace Microsoft.Quantum.Primitive {

    operation H (qubit : Qubit) : () {
        body intrinsic
        adjoint self
        controlled intrinsic
        controlled adjoint self
    }

    operation X (qubit : Qubit) : () {
        body intrinsic
        adjoint self
        controlled intrinsic
        controlled adjoint self
    }

    operation Y (qubit : Qubit) : () {
        body intrinsic
        adjoint self
        controlled intrinsic
        controlled adjoint self
    }

    operation Z (qubit : Qubit) : () {
        body intrinsic
        adjoint self
        controlled intrinsic
        controlled adjoint self
    }

    operation I (qubit : Qubit) : () {
        body intrinsic
        adjoint self
        controlled intrinsic
        controlled adjoint self
    }

    operation T (qubit : Qubit) : () {
        body intrinsic
        adjoint intrinsic
        controlled intrinsic
        controlled adjoint intrinsic
    }

    // diag(1, e^{i pi numerator / 2^power})
    operation R1Frac (numerator : Int, power : Int, qubit : Qubit) : () {
        body intrinsic
        adjoint intrinsic
        controlled intrinsic
        controlled adjoint intrinsic
    }

    operation Measure (bases : Pauli[], qubits : Qubit[]) : Result {
        body intrinsic
    }

    operation M (qubit : Qubit) : Result {
        body {
            return Measure([PauliZ], [qubit]);
        }
    }

    operation Reset (target : Qubit) : () {
        body {
            if (M(target) == One) {
                X(target);
            }
        }
    }

    operation CNOT (control : Qubit, target : Qubit) : () {
        body {
            (Controlled X)([control], target);
        }
        adjoint self
        controlled auto
        controlled adjoint auto
    }

    operation CCNOT (control1 : Qubit, control2 : Qubit, target : Qubit) : () {
        body {
            (Controlled X)([control1; control2], target);
        }
        adjoint self
        controlled auto
        adjoint controlled auto
    }

    function Length<`T> (array : `T[]) : Int {
        body intrinsic
    }

    function Message (msg : String) : () {
        body intrinsic
    }

    function Assert (bases : Pauli[], qubits : Qubit[], result : Result) : () {
        body intrinsic
    }

    function AssertProb (bases : Pauli[], qubits : Qubit[], result : Result, probability : Double, tolerance : Double) : () {
        body intrinsic
    }
}
)qds";

const char* const kCanon = R"qds(namespace Microsoft.Quantum.Canon {
    open Microsoft.Quantum.Primitive;

    newtype BigEndian = Qubit[];

    newtype LittleEndian = Qubit[];

    operation ApproximateQFT ( a: Int, qs: BigEndian) : () {
        body {
            let nQubits = Length(qs);

            for (i in 0 .. (nQubits - 1) ) {
                for (j in 0..(i-1)) {
                if ( (i-j) < a ) {
                    (Controlled R1Frac)( [qs[i]], (1, i - j, qs[j]) );
                    }
                }
                H(qs[i]);
            }

            // Apply the bit reversal permutation
            // to the quantum register
            SwapReverseRegister(qs);
        }

        adjoint auto
        controlled auto
        controlled adjoint auto
    }

    operation QFT (qs : BigEndian) : () {
        body {
            ApproximateQFT(Length(qs), qs);
        }
        adjoint auto
        controlled auto
        controlled adjoint auto
    }

    operation SWAP (q1 : Qubit, q2 : Qubit) : () {
        body {
            CNOT(q1, q2);
            CNOT(q2, q1);
            CNOT(q1, q2);
        }
        adjoint self
        controlled auto
        controlled adjoint auto
    }

    operation SwapReverseRegister (register : Qubit[]) : () {
        body {
            let nQubits = Length(register);
            for (i in 0 .. nQubits / 2 - 1) {
                SWAP(register[i], register[nQubits - 1 - i]);
            }
        }
        adjoint auto
        controlled auto
        controlled adjoint auto
    }

    function Map<`T, `U> (mapper : (`T -> `U), array : `T[]) : `U[] {
        mutable result = new `U[0];
        for (element in array) {
            set result = result + [mapper(element)];
        }
        return result;
    }

    function Fold<`T, `U> (folder : ((`U, `T) -> `U), state : `U, array : `T[]) : `U {
        mutable current = state;
        for (element in array) {
            set current = folder(current, element);
        }
        return current;
    }

    operation OperationPowImpl<`T> (oracle : (`T => ()), power : Int, target : `T) : () {
        body {
            for (idxApplication in 0 .. power - 1) {
                oracle(target);
            }
        }
    }

    function OperationPow<`T> (oracle : (`T => ()), power : Int) : (`T => ()) {
        return OperationPowImpl(oracle, power, _);
    }
}
)qds";

}  // namespace

const PreludeFile& core_file() {
  static const PreludeFile f{"<core>", kCore};
  return f;
}

const std::vector<PreludeFile>& prelude_files() {
  static const std::vector<PreludeFile> files{
      {"<prelude:Microsoft.Quantum.Primitive>", kPrimitive},
      {"<prelude:Microsoft.Quantum.Canon>", kCanon},
  };
  return files;
}

}  // namespace qdsl::stdlib
