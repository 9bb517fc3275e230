/** Class-activation saliency (Grad-CAM) for sequential tfjs layers
 * models. The target convolutional layer is a parameter; the class
 * defaults to the model's top prediction for the image. */

import * as tf from '@tensorflow/tfjs'

export function gradCam(
  model: tf.LayersModel,
  input: tf.Tensor4D,
  targetLayer: string,
  classIndex?: number,
): tf.Tensor2D {
  const layers = model.layers
  const idx = layers.findIndex(l => l.name === targetLayer)
  if (idx < 0) {
    const names = layers.map(l => l.name).join(', ')
    throw new Error(`no layer named "${targetLayer}" (have: ${names})`)
  }
  return tf.tidy(() => {
    let acts: tf.Tensor = input
    for (let i = 0; i <= idx; i++) {
      acts = layers[i].apply(acts) as tf.Tensor
    }
    if (acts.rank !== 4) {
      throw new Error(`layer "${targetLayer}" output has rank ${acts.rank}, need a spatial feature map`)
    }
    const tail = (a: tf.Tensor): tf.Tensor => {
      let out = a
      for (let i = idx + 1; i < layers.length; i++) {
        out = layers[i].apply(out) as tf.Tensor
      }
      return out
    }
    const cls = classIndex ?? (tail(acts).argMax(-1).dataSync()[0] as number)
    const score = (a: tf.Tensor) =>
      (tail(a) as tf.Tensor2D).slice([0, cls], [1, 1]).sum() as tf.Scalar
    const grads = tf.grad(score)(acts)
    const weights = grads.mean([1, 2], true)
    const cam = tf.relu(tf.sum(tf.mul(acts, weights), -1)).squeeze([0])
    return cam as tf.Tensor2D
  })
}

/** Upsample a CAM to the source image size and min-max normalize it to
 * the 16-bit raster range. A constant map normalizes to all zeros. */
export function camToUint16(cam: tf.Tensor2D, width: number, height: number): Uint16Array {
  const resized = tf.tidy(() =>
    tf.image
      .resizeBilinear(cam.expandDims(-1) as tf.Tensor3D, [height, width])
      .squeeze([2]),
  )
  const data = resized.dataSync()
  resized.dispose()
  let min = Infinity
  let max = -Infinity
  for (const v of data) {
    if (v < min) min = v
    if (v > max) max = v
  }
  const out = new Uint16Array(data.length)
  if (max > min) {
    for (let i = 0; i < data.length; i++) {
      out[i] = Math.round(((data[i] - min) / (max - min)) * 65535)
    }
  }
  return out
}
