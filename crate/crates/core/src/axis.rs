//! Applying one-dimensional linear maps along an axis of a row-major tensor.

/// Calls `op(input_line, output_line)` for every line of `data` parallel to
/// `axis`, where `data` has shape `[n; dim]` (last axis fastest).
pub fn map_along_axis<T, U, F>(data: &[T], n: usize, dim: usize, axis: usize, out_len: usize, op: F) -> Vec<U>
where
    T: Copy + Default,
    U: Copy + Default,
    F: Fn(&[T], &mut [U]),
{
    debug_assert_eq!(data.len(), n.pow(dim as u32));
    let stride = out_len.pow((dim - 1 - axis) as u32);
    let in_stride = n.pow((dim - 1 - axis) as u32);
    let outer = n.pow(axis as u32);
    let mut out = vec![U::default(); outer * out_len * stride];
    let mut line_in = vec![T::default(); n];
    let mut line_out = vec![U::default(); out_len];
    for o in 0..outer {
        for s in 0..in_stride {
            for (j, v) in line_in.iter_mut().enumerate() {
                *v = data[o * n * in_stride + j * in_stride + s];
            }
            op(&line_in, &mut line_out);
            for (j, v) in line_out.iter().enumerate() {
                out[o * out_len * stride + j * stride + s] = *v;
            }
        }
    }
    out
}
