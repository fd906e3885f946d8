//! Copy-on-write publication cell for one writer and many readers.

use std::sync::Arc;

use parking_lot::RwLock;

/// Readers take an `Arc` snapshot without blocking the writer for longer than
/// a pointer swap. The writer mutates through [`SnapshotCell::update`], which
/// clones the value only while some reader still holds the old snapshot.
#[derive(Debug)]
pub struct SnapshotCell<T> {
    inner: Arc<RwLock<Arc<T>>>,
}

impl<T> Clone for SnapshotCell<T> {
    fn clone(&self) -> Self {
        SnapshotCell {
            inner: Arc::clone(&self.inner),
        }
    }
}

impl<T: Default> Default for SnapshotCell<T> {
    fn default() -> Self {
        Self::new(T::default())
    }
}

impl<T> SnapshotCell<T> {
    pub fn new(value: T) -> Self {
        SnapshotCell {
            inner: Arc::new(RwLock::new(Arc::new(value))),
        }
    }

    pub fn read(&self) -> Arc<T> {
        Arc::clone(&self.inner.read())
    }

    pub fn publish(&self, value: T) {
        *self.inner.write() = Arc::new(value);
    }
}

impl<T: Clone> SnapshotCell<T> {
    pub fn update<R>(&self, edit: impl FnOnce(&mut T) -> R) -> R {
        let mut guard = self.inner.write();
        edit(Arc::make_mut(&mut guard))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn readers_keep_their_snapshot() {
        let cell = SnapshotCell::new(vec![1]);
        let before = cell.read();
        cell.update(|v| v.push(2));
        assert_eq!(*before, vec![1]);
        assert_eq!(*cell.read(), vec![1, 2]);
        cell.publish(vec![]);
        assert!(cell.read().is_empty());
    }
}
