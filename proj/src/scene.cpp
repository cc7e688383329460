namespace toda {}
